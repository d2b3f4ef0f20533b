"""Modulo-lattice transmission of a source with receiver side information.

The transmitter holds Q and the receiver holds J; both know the dither V.
Sending X = [beta*(J + Q) + V] mod lattice and folding the channel output
back with the same dither and side information leaves U = [beta*Q + Z] mod
lattice, so the side information drops out exactly and the receiver sees the
scaled source plus channel noise whenever that sum stays inside the
fundamental cell.  Leaving the cell is the aliasing event; callers detect it
by comparing U against the known beta*Q + Z in tests and simulations.

The channel-estimator coefficient is pinned to 1 (the only configuration
used downstream); the receiver-side output scaling drops out of every
quantity of interest and is omitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattices import Lattice, modulo

__all__ = ["JsccParams", "wz_encode", "wz_receive"]


@dataclass(frozen=True)
class JsccParams:
    """Source scale and lattice for one modulo-lattice link."""

    beta: float
    lattice: Lattice
    alpha_c: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise ValueError(f"beta must be finite and positive, got {self.beta!r}")
        # extension point only; every supported configuration uses 1
        if self.alpha_c != 1.0:
            raise ValueError(
                f"alpha_c is fixed to 1 in this scheme, got {self.alpha_c!r}"
            )


def _vec(params: JsccParams, name: str, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = params.lattice.dimension
    if x.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {x.shape}")
    return x


def wz_encode(q, j, v, params: JsccParams) -> np.ndarray:
    """Channel input [beta*(j + q) + v] mod lattice.

    Uniform on the fundamental cell over the dither draw, hence transmit
    power equals the lattice second moment regardless of q and j.
    """
    q = _vec(params, "q", q)
    j = _vec(params, "j", j)
    v = _vec(params, "v", v)
    return modulo(params.lattice, params.beta * (j + q) + v)


def wz_receive(y, v, j, params: JsccParams) -> np.ndarray:
    """Receiver residue [y - v - beta*j] mod lattice.

    Equals [beta*q + z] mod lattice for channel noise z, and is exactly
    beta*q + z whenever that vector lies in the fundamental cell.
    """
    y = _vec(params, "y", y)
    v = _vec(params, "v", v)
    j = _vec(params, "j", j)
    return modulo(params.lattice, params.alpha_c * y - v - params.beta * j)

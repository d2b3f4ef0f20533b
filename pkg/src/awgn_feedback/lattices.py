"""Finite-dimensional lattices with exact nearest-neighbor quantization.

Supported families: the scaled cubic lattice cZ^n (any n, including the
scalar case n=1), the checkerboard lattice D4, and the Gosset lattice E8.
Lattice points and modulo residues are plain float ndarrays; no wrapper
types.  A residue r returned by :func:`modulo` satisfies quantize_nn(r) = 0.

Quantization ties on Voronoi facets are broken toward the lexicographically
smallest lattice point, so every operation here is a deterministic pure
function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Lattice",
    "cubic_lattice",
    "d4_lattice",
    "e8_lattice",
    "looseness_to_vnr",
    "make_lattice",
    "modulo",
    "quantize_nn",
    "sample_dither",
    "scale_to_power",
    "vnr",
]

TWO_PI_E = 2.0 * math.pi * math.e

# Monte-Carlo settings for the D4/E8 second moments (no closed form used
# here); one batch per family, cached for the process lifetime.
_MOMENT_SEED = 20260816
_MOMENT_SAMPLES = 1_000_000
_UNIT_MOMENT_CACHE: dict[str, float] = {}


@dataclass(frozen=True, eq=False)
class Lattice:
    """An immutable lattice: scale * (base family), with cached moments.

    ``second_moment`` is the per-dimension power of a uniform dither over
    the fundamental Voronoi cell; ``nsm`` is the scale-free version
    second_moment / cell_volume**(2/n).
    """

    family: str
    dimension: int
    scale: float
    generator: np.ndarray
    cell_volume: float
    second_moment: float
    nsm: float


# =============================================================================
# CONSTRUCTION
# =============================================================================

def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def cubic_lattice(dimension: int, spacing: float = 1.0) -> Lattice:
    """The lattice spacing * Z^dimension."""
    if not isinstance(dimension, int) or dimension < 1:
        raise ValueError(f"dimension must be a positive integer, got {dimension!r}")
    spacing = _check_scale(spacing)
    return Lattice(
        family="cubic",
        dimension=dimension,
        scale=spacing,
        generator=_frozen(spacing * np.eye(dimension)),
        cell_volume=spacing**dimension,
        second_moment=spacing * spacing / 12.0,
        nsm=1.0 / 12.0,
    )


def d4_lattice(scale: float = 1.0) -> Lattice:
    """The checkerboard lattice: integer 4-vectors with even coordinate sum."""
    scale = _check_scale(scale)
    base = np.array(
        [
            [1.0, 1.0, 0.0, 0.0],
            [1.0, -1.0, 0.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
            [0.0, 0.0, 1.0, -1.0],
        ]
    )
    return _family_lattice("d4", 4, scale, base, unit_volume=2.0)


def e8_lattice(scale: float = 1.0) -> Lattice:
    """The Gosset lattice: D8 together with its half-integer coset."""
    scale = _check_scale(scale)
    base = np.zeros((8, 8))
    base[0, 0] = 2.0
    for i in range(1, 7):
        base[i, i - 1] = -1.0
        base[i, i] = 1.0
    base[7, :] = 0.5
    return _family_lattice("e8", 8, scale, base, unit_volume=1.0)


def make_lattice(name: str, dimension: int | None = None) -> Lattice:
    """Factory by family name: 'z' (cubic, any dimension), 'd4', or 'e8'.

    ``dimension`` sizes the cubic family (default 1) and must be omitted or
    match for the fixed-dimension families.
    """
    key = name.strip().lower()
    if key in ("z", "cubic", "int"):
        return cubic_lattice(1 if dimension is None else dimension)
    if key == "d4":
        fixed = d4_lattice()
    elif key == "e8":
        fixed = e8_lattice()
    else:
        raise ValueError(
            f"unknown lattice family {name!r}; expected z, d4, or e8"
        )
    if dimension is not None and dimension != fixed.dimension:
        raise ValueError(
            f"lattice {key!r} has dimension {fixed.dimension}, not {dimension}"
        )
    return fixed


def _check_scale(scale: float) -> float:
    scale = float(scale)
    if not math.isfinite(scale) or scale <= 0.0:
        raise ValueError(f"scale must be finite and positive, got {scale!r}")
    return scale


def _family_lattice(
    family: str, n: int, scale: float, base: np.ndarray, unit_volume: float
) -> Lattice:
    unit_moment = _unit_second_moment(family, n, base, unit_volume)
    return Lattice(
        family=family,
        dimension=n,
        scale=scale,
        generator=_frozen(scale * base),
        cell_volume=unit_volume * scale**n,
        second_moment=unit_moment * scale * scale,
        nsm=unit_moment / unit_volume ** (2.0 / n),
    )


def _unit_second_moment(
    family: str, n: int, base: np.ndarray, unit_volume: float
) -> float:
    """Per-dimension dither power of the unit-scale lattice, by Monte Carlo."""
    cached = _UNIT_MOMENT_CACHE.get(family)
    if cached is not None:
        return cached
    rng = np.random.default_rng(_MOMENT_SEED)
    u = rng.random((_MOMENT_SAMPLES, n))
    y = u @ base
    residues = y - _quantize_unit_batch(family, y)
    moment = float(np.mean(residues * residues))
    _UNIT_MOMENT_CACHE[family] = moment
    return moment


# =============================================================================
# QUANTIZATION
# =============================================================================

def _round_half_down(t: float) -> float:
    # nearest integer, exact halves toward -inf (the lex-smaller candidate)
    return math.ceil(t - 0.5)


def _quantize_cubic(y: np.ndarray) -> np.ndarray:
    return np.array([_round_half_down(t) for t in y])


def _quantize_dn(y: np.ndarray) -> np.ndarray:
    """Nearest point of D_n = even-sum integer vectors, lex tie-break.

    Start from the nearest integer vector f (halves rounded down, which is
    the lex-min nearest point of Z^n).  If its coordinate sum is even it is
    optimal: every equally near alternative only raises coordinates.  If the
    sum is odd, exactly one extra coordinate flip is needed, and a flip at
    coordinate i in direction d costs 1 - 2*d*e_i in squared distance; three
    or more flips can never beat the best single flip.
    """
    f = np.array([_round_half_down(t) for t in y])
    e = y - f
    if int(f.sum()) % 2 == 0:
        return f
    pen_up = 1.0 - 2.0 * e
    pen_dn = 1.0 + 2.0 * e
    best = min(pen_up.min(), pen_dn.min())
    candidates = []
    for i in range(len(f)):
        if pen_up[i] == best:
            g = f.copy()
            g[i] += 1.0
            candidates.append(g)
        if pen_dn[i] == best:
            g = f.copy()
            g[i] -= 1.0
            candidates.append(g)
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda v: tuple(v))


_E8_HALF = np.full(8, 0.5)


def _quantize_e8(y: np.ndarray) -> np.ndarray:
    """Nearest point of E8 = D8 union (D8 + half), lex tie-break across cosets."""
    q0 = _quantize_dn(y)
    q1 = _E8_HALF + _quantize_dn(y - _E8_HALF)
    d0 = float(np.dot(y - q0, y - q0))
    d1 = float(np.dot(y - q1, y - q1))
    if d0 < d1:
        return q0
    if d1 < d0:
        return q1
    return min((q0, q1), key=lambda v: tuple(v))


def _quantize_unit(family: str, y: np.ndarray) -> np.ndarray:
    if family == "cubic":
        return _quantize_cubic(y)
    if family == "d4":
        return _quantize_dn(y)
    return _quantize_e8(y)


def _quantize_unit_batch(family: str, y: np.ndarray) -> np.ndarray:
    """Vectorized unit-scale quantizer for Monte-Carlo batches.

    Tie handling is first-index rather than full lex (ties are measure-zero
    under continuous inputs); the public scalar path is the contract.
    """
    if family == "cubic":
        return np.ceil(y - 0.5)

    def dn(yy: np.ndarray) -> np.ndarray:
        f = np.ceil(yy - 0.5)
        e = yy - f
        odd = np.nonzero(np.asarray(f.sum(axis=1), dtype=np.int64) % 2 != 0)[0]
        if odd.size:
            pen = 1.0 - 2.0 * np.abs(e[odd])
            j = np.argmin(pen, axis=1)
            step = np.where(e[odd, j] > 0.0, 1.0, -1.0)
            f[odd, j] += step
        return f

    if family == "d4":
        return dn(y)
    q0 = dn(y)
    q1 = _E8_HALF + dn(y - _E8_HALF)
    d0 = ((y - q0) ** 2).sum(axis=1)
    d1 = ((y - q1) ** 2).sum(axis=1)
    return np.where((d1 < d0)[:, None], q1, q0)


def _check_point(lattice: Lattice, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (lattice.dimension,):
        raise ValueError(
            f"expected a vector of shape ({lattice.dimension},), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector must be finite")
    return x


def quantize_nn(lattice: Lattice, x) -> np.ndarray:
    """Nearest lattice point in Euclidean distance; lex-smallest on ties."""
    x = _check_point(lattice, x)
    return lattice.scale * _quantize_unit(lattice.family, x / lattice.scale)


def modulo(lattice: Lattice, x) -> np.ndarray:
    """Residue x - quantize_nn(x), a point of the fundamental Voronoi cell."""
    x = _check_point(lattice, x)
    return x - lattice.scale * _quantize_unit(lattice.family, x / lattice.scale)


def sample_dither(lattice: Lattice, rng: np.random.Generator) -> np.ndarray:
    """A dither uniform on the fundamental Voronoi cell.

    Samples uniformly on the fundamental parallelepiped spanned by the
    generator rows and folds it into the Voronoi cell; the fold is
    volume-preserving, so uniformity is exact.
    """
    u = rng.random(lattice.dimension)
    return modulo(lattice, u @ lattice.generator)


# =============================================================================
# POWER AND VNR ACCOUNTING
# =============================================================================

def scale_to_power(lattice: Lattice, target_power: float) -> Lattice:
    """Rescale so the per-dimension dither power equals ``target_power``."""
    target_power = float(target_power)
    if not math.isfinite(target_power) or target_power <= 0.0:
        raise ValueError(
            f"target power must be finite and positive, got {target_power!r}"
        )
    s = math.sqrt(target_power / lattice.second_moment)
    return replace(
        lattice,
        scale=lattice.scale * s,
        generator=_frozen(lattice.generator * s),
        cell_volume=lattice.cell_volume * s**lattice.dimension,
        second_moment=lattice.second_moment * s * s,
    )


def vnr(lattice: Lattice, noise_variance: float) -> float:
    """Volume-to-noise ratio cell_volume**(2/n) / noise_variance."""
    noise_variance = float(noise_variance)
    if not math.isfinite(noise_variance) or noise_variance <= 0.0:
        raise ValueError(
            f"noise variance must be finite and positive, got {noise_variance!r}"
        )
    return lattice.cell_volume ** (2.0 / lattice.dimension) / noise_variance


def looseness_to_vnr(looseness: float, lattice: Lattice | None = None) -> float:
    """VNR mu realizing looseness L: 2*pi*e*L for the asymptotically best
    shaping, or L / nsm for a concrete lattice (L = mu * nsm)."""
    looseness = float(looseness)
    if not math.isfinite(looseness) or looseness <= 0.0:
        raise ValueError(f"looseness must be finite and positive, got {looseness!r}")
    if lattice is None:
        return TWO_PI_E * looseness
    return looseness / lattice.nsm

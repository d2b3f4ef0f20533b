"""Monte-Carlo simulator of the K-round interactive feedback protocol.

One trial runs two independent copies of the scheme (the "interlaced" pair:
in a real deployment their blocks alternate on the channel so each terminal
always has a finished block to react to; statistically the interlacing is
pure scheduling, so the simulator runs both copies back to back on one trial
seed).  Per copy:

  round 1      Terminal A sends the codeword Theta; B sets the estimate
               theta_hat = Y_1, so the estimation error starts at the
               channel noise (sigma_1^2 = sigma^2).
  rounds 2..K  B feeds back its estimate through a dithered modulo-lattice
               map scaled by gamma_k; A reconstructs gamma_k*eps_k + fb
               noise (exact unless the pre-modulo value leaves the Voronoi
               cell: the aliasing event), rescales it to full forward
               power, and sends it; B applies the MMSE correction.
  decode       B picks the nearest codeword to theta_hat_K.

The coupled twin runs the same rounds with the modulo maps removed (its
feedback power is deliberately unbounded).  Both systems consume the same
draws, and the receiver residue is computed in its dither-cancelled form
gamma*(theta_hat - theta) + noise, which equals the modulo-chain value
exactly and keeps the two sample paths bit-identical until the first
aliasing event.  The union-of-aliasing indicator therefore agrees between
the systems on every trial, not merely with high probability.

Randomness: trial t uses Generator(Philox(key=[master_seed, t])), so trials
are reproducible individually and in any execution order; the random
codebook draws from the reserved stream key [master_seed, 2**63 + 1], and
trial indices must stay below 2**63.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .feedback import ChannelParams
from .lattices import Lattice, modulo, scale_to_power

__all__ = [
    "SchemeConfig",
    "SimulationSummary",
    "TrialRecord",
    "alpha_coefficient",
    "estimate_error_prob",
    "gamma_coefficient",
    "run_coupled_trial",
    "run_trial",
    "wiener_update",
    "wilson_interval",
]

# 95% normal quantile, pinned so intervals are bit-stable across platforms
Z95 = 1.959963984540054

_CODEBOOK_STREAM = (1 << 63) + 1
_MAX_TRIAL_INDEX = 1 << 63
_MAX_PAM_ORDER = 1 << 20
_MAX_CODEBOOK_BITS = 16

# real and coupled estimation errors must agree at least this tightly up to
# the first aliasing event (they agree exactly in the current pipeline)
_AGREEMENT_ATOL = 1e-9


# =============================================================================
# COEFFICIENTS AND THE VARIANCE RECURSION
# =============================================================================

def alpha_coefficient(params: ChannelParams, looseness: float) -> float:
    """Forward rescale sqrt(L*P/P~) putting the reconstruction at power P."""
    if looseness <= 0.0:
        raise ValueError(f"looseness must be positive, got {looseness!r}")
    return math.sqrt(looseness * params.p / params.p_tilde)


def gamma_coefficient(
    params: ChannelParams, looseness: float, sigma_k2: float
) -> float:
    """Feedback scale making P~ / (gamma^2 sigma_k^2 + fb noise var) = L."""
    if sigma_k2 <= 0.0 or not math.isfinite(sigma_k2):
        raise ValueError(f"estimation variance must be positive, got {sigma_k2!r}")
    if looseness <= 0.0:
        raise ValueError(f"looseness must be positive, got {looseness!r}")
    num = params.p_tilde / looseness - params.sigma2_tilde
    if num <= 0.0:
        raise ValueError(
            f"looseness {looseness} leaves no signal power on the feedback link "
            f"(needs L < bsnr = {params.bsnr})"
        )
    return math.sqrt(num / sigma_k2)


def wiener_update(
    sigma_k2: float, params: ChannelParams, looseness: float
) -> tuple[float, float]:
    """One MMSE correction round: returns (beta_next, sigma_next^2).

    beta_next scales the received correction, sigma_next^2 is the new
    estimation-error variance sigma_k^2 * (1 + L/dsnr) / (1 + snr).  With a
    noiseless feedback link and looseness 0 this degenerates to the classic
    exact-feedback recursion sigma_k^2 / (1 + snr).
    """
    sigma_k2 = float(sigma_k2)
    if not math.isfinite(sigma_k2) or sigma_k2 <= 0.0:
        raise ValueError(f"estimation variance must be positive, got {sigma_k2!r}")
    looseness = float(looseness)
    if looseness == 0.0:
        if params.sigma2_tilde != 0.0:
            raise ValueError("looseness 0 is defined only for noiseless feedback")
        ag = math.sqrt(params.p / sigma_k2)
        a2s = 0.0
    else:
        ag = alpha_coefficient(params, looseness) * gamma_coefficient(
            params, looseness, sigma_k2
        )
        a2s = (looseness * params.p / params.p_tilde) * params.sigma2_tilde
    denom = ag * ag * sigma_k2 + a2s + params.sigma2
    beta = ag * sigma_k2 / denom
    sigma_next = sigma_k2 * (params.sigma2 + a2s) / denom
    return beta, sigma_next


# =============================================================================
# CONFIGURATION
# =============================================================================

@dataclass(frozen=True, eq=False)
class SchemeConfig:
    """A fully resolved simulation setup.

    The lattice passed in is rescaled so its dither power equals the
    feedback power budget.  The gamma/beta/variance schedule is fixed by the
    parameters alone (it never adapts to data), so it is computed once here;
    construction fails, rather than any trial, if a round's gamma would not
    be real.  ``codebook`` may be 'pam' (scalar lattices only), 'gaussian'
    (dimension >= 2), or 'auto' to pick by dimension.
    """

    params: ChannelParams
    rounds: int
    looseness: float
    lattice: Lattice
    rate_bits: float
    master_seed: int
    codebook: str = "auto"

    # derived at construction
    exact_feedback: bool = field(init=False, repr=False)
    m_codewords: int = field(init=False, repr=False)
    realized_rate_bits: float = field(init=False, repr=False)
    alpha: float = field(init=False, repr=False)
    gains: tuple = field(init=False, repr=False)
    betas: tuple = field(init=False, repr=False)
    sigmas2: tuple = field(init=False, repr=False)
    codewords: np.ndarray = field(init=False, repr=False)
    pam_step: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        p = self.params
        if not isinstance(self.rounds, int) or self.rounds < 1:
            raise ValueError(f"rounds must be a positive integer, got {self.rounds!r}")
        rate = float(self.rate_bits)
        if not math.isfinite(rate) or rate < 0.0:
            raise ValueError(f"rate must be finite and nonnegative, got {rate!r}")
        if not isinstance(self.master_seed, int) or not (
            0 <= self.master_seed < (1 << 64)
        ):
            raise ValueError("master_seed must be an integer in [0, 2**64)")

        loose = float(self.looseness)
        exact = loose == 0.0
        if exact:
            if p.sigma2_tilde != 0.0:
                raise ValueError(
                    "looseness 0 selects exact feedback and needs a noiseless "
                    "feedback link"
                )
        else:
            if not math.isfinite(loose) or loose < 1.0:
                raise ValueError(
                    f"looseness must be >= 1 (or exactly 0 for exact feedback), "
                    f"got {loose!r}"
                )
            if p.sigma2_tilde > 0.0 and loose >= p.bsnr:
                raise ValueError(
                    f"looseness {loose} must stay below bsnr {p.bsnr} for the "
                    f"feedback scale to be real"
                )
        object.__setattr__(self, "looseness", loose)
        object.__setattr__(self, "exact_feedback", exact)
        object.__setattr__(self, "lattice", scale_to_power(self.lattice, p.p_tilde))
        object.__setattr__(self, "alpha", 0.0 if exact else alpha_coefficient(p, loose))

        self._build_codebook()
        self._build_schedule()

    # -- codebook -------------------------------------------------------

    def _build_codebook(self) -> None:
        p = self.params
        n = self.lattice.dimension
        mode = self.codebook.strip().lower()
        if mode == "auto":
            mode = "pam" if n == 1 else "gaussian"
        if mode == "pam":
            if n != 1:
                raise ValueError("PAM signaling needs a one-dimensional lattice")
            m = max(1, math.ceil(2.0 ** (self.rounds * self.rate_bits)))
            if m > _MAX_PAM_ORDER:
                raise ValueError(f"PAM order {m} is beyond the simulator's range")
            # extreme levels at +-sqrt(P): every codeword meets the power
            # constraint individually
            step = 2.0 * math.sqrt(p.p) / (m - 1) if m > 1 else 0.0
            levels = step * (np.arange(m) - 0.5 * (m - 1))
            codewords = levels[:, None]
        elif mode == "gaussian":
            if n < 2:
                raise ValueError("the random codebook needs dimension >= 2")
            bits = math.ceil(n * self.rounds * self.rate_bits)
            if bits > _MAX_CODEBOOK_BITS:
                raise ValueError(
                    f"codebook of 2**{bits} codewords is beyond brute-force ML"
                )
            m = 1 << bits
            rng = np.random.Generator(
                np.random.Philox(key=[self.master_seed, _CODEBOOK_STREAM])
            )
            codewords = math.sqrt(p.p) * rng.standard_normal((m, n))
            power = (codewords * codewords).sum(axis=1) / n
            hot = power > p.p
            if np.any(hot):
                codewords[hot] *= np.sqrt(p.p / power[hot])[:, None]
            step = 0.0
        else:
            raise ValueError(
                f"unknown codebook {self.codebook!r}; expected pam, gaussian, or auto"
            )
        codewords = np.ascontiguousarray(codewords, dtype=float)
        codewords.setflags(write=False)
        object.__setattr__(self, "codebook", mode)
        object.__setattr__(self, "m_codewords", m)
        object.__setattr__(self, "realized_rate_bits", math.log2(m) / (n * self.rounds))
        object.__setattr__(self, "codewords", codewords)
        object.__setattr__(self, "pam_step", step)

    # -- gamma/beta/variance schedule ------------------------------------

    def _build_schedule(self) -> None:
        p = self.params
        steps = self.rounds - 1
        if p.sigma2 == 0.0:
            # noiseless forward: the first estimate is already exact and no
            # correction round carries information
            object.__setattr__(self, "gains", (0.0,) * steps)
            object.__setattr__(self, "betas", (0.0,) * steps)
            object.__setattr__(self, "sigmas2", (0.0,) * self.rounds)
            return
        gains = []
        betas = []
        sigmas = [p.sigma2]
        s = p.sigma2
        for _ in range(steps):
            if self.exact_feedback:
                gains.append(math.sqrt(p.p / s))
            else:
                gains.append(gamma_coefficient(p, self.looseness, s))
            b, s = wiener_update(s, p, self.looseness)
            betas.append(b)
            sigmas.append(s)
        object.__setattr__(self, "gains", tuple(gains))
        object.__setattr__(self, "betas", tuple(betas))
        object.__setattr__(self, "sigmas2", tuple(sigmas))

    @property
    def dimension(self) -> int:
        return self.lattice.dimension

    @property
    def blocklength(self) -> int:
        """Total channel uses per trial and scheme copy, forward + feedback."""
        return 2 * self.rounds * self.dimension


# =============================================================================
# TRIALS
# =============================================================================

@dataclass(frozen=True)
class TrialRecord:
    """Events and bookkeeping of one trial of one system (real or coupled).

    ``aliasing_flags[i][k]`` marks scheme copy i wrapping at correction
    round k; ``coupled_agreement`` states that the real and coupled
    estimation errors agreed up to the first aliasing event of each copy.
    Powers are per dimension, averaged over the trial's transmissions.
    """

    trial_index: int
    system: str
    aliasing_flags: tuple[tuple[bool, ...], ...]
    first_aliasing_round: tuple[int | None, ...]
    decode_success: tuple[bool, ...]
    ff_power: float
    fb_power: float
    coupled_agreement: bool


class _SystemOutcome:
    __slots__ = ("flags", "first_alias", "decoded", "eps_path", "eps_final",
                 "ff_sq", "fb_sq")

    def __init__(self, flags, first_alias, decoded, eps_path, eps_final,
                 ff_sq, fb_sq):
        self.flags = flags
        self.first_alias = first_alias
        self.decoded = decoded
        self.eps_path = eps_path
        self.eps_final = eps_final
        self.ff_sq = ff_sq
        self.fb_sq = fb_sq


def _decode_index(cfg: SchemeConfig, theta_hat) -> int:
    if cfg.codebook == "pam":
        m = cfg.m_codewords
        if m == 1:
            return 0
        t = float(theta_hat[0]) / cfg.pam_step + 0.5 * (m - 1)
        return min(m - 1, max(0, round(t)))
    diff = cfg.codewords - theta_hat
    return int(np.argmin((diff * diff).sum(axis=1)))


def _run_copy_scalar(cfg, theta, z_fwd, z_fb, dithers, with_modulo):
    """One scheme copy, scalar fast path (dimension-1 cubic lattice)."""
    spacing = cfg.lattice.scale
    alpha = cfg.alpha
    th = float(theta[0])
    th_hat = th + z_fwd[0]
    ff_sq = th * th
    fb_sq = 0.0
    flags = []
    first = None
    eps_path = [th_hat - th]
    for k in range(cfg.rounds - 1):
        g = cfg.gains[k]
        eps = th_hat - th
        if cfg.exact_feedback:
            fb = th_hat
            fb_sq += fb * fb
            flags.append(False)
            x = g * eps
        else:
            fb_raw = g * th_hat + dithers[k]
            if with_modulo:
                fb = fb_raw - spacing * math.ceil(fb_raw / spacing - 0.5)
            else:
                fb = fb_raw
            fb_sq += fb * fb
            w = g * eps + z_fb[k]
            wrap = math.ceil(w / spacing - 0.5)
            aliased = wrap != 0
            flags.append(aliased)
            if aliased and first is None:
                first = k + 1
            u = w - spacing * wrap if with_modulo else w
            x = alpha * u
        ff_sq += x * x
        y = x + z_fwd[k + 1]
        th_hat = th_hat - cfg.betas[k] * y
        eps_path.append(th_hat - th)
    idx = _decode_index(cfg, np.array([th_hat]))
    return _SystemOutcome(flags, first, idx, eps_path,
                          (th_hat - th) ** 2, ff_sq, fb_sq)


def _run_copy_vector(cfg, theta, z_fwd, z_fb, dithers, with_modulo):
    """One scheme copy on an n-dimensional lattice."""
    lat = cfg.lattice
    n = lat.dimension
    alpha = cfg.alpha
    th_hat = theta + z_fwd[0]
    ff_sq = float(np.dot(theta, theta))
    fb_sq = 0.0
    flags = []
    first = None
    eps_path = [th_hat - theta]
    for k in range(cfg.rounds - 1):
        g = cfg.gains[k]
        eps = th_hat - theta
        if cfg.exact_feedback:
            fb = th_hat
            fb_sq += float(np.dot(fb, fb))
            flags.append(False)
            x = g * eps
        else:
            fb_raw = g * th_hat + dithers[k]
            fb = modulo(lat, fb_raw) if with_modulo else fb_raw
            fb_sq += float(np.dot(fb, fb))
            w = g * eps + z_fb[k]
            residue = modulo(lat, w)
            aliased = bool(np.any(residue != w))
            flags.append(aliased)
            if aliased and first is None:
                first = k + 1
            u = residue if with_modulo else w
            x = alpha * u
        ff_sq += float(np.dot(x, x))
        y = x + z_fwd[k + 1]
        th_hat = th_hat - cfg.betas[k] * y
        eps_path.append(th_hat - theta)
    idx = _decode_index(cfg, th_hat)
    eps = th_hat - theta
    return _SystemOutcome(flags, first, idx, eps_path,
                          float(np.dot(eps, eps)), ff_sq, fb_sq)


def _paths_agree(real: _SystemOutcome, coupled: _SystemOutcome, scalar: bool) -> bool:
    stop = real.first_alias if real.first_alias is not None else len(real.eps_path)
    for k in range(stop):
        a, b = real.eps_path[k], coupled.eps_path[k]
        d = abs(a - b) if scalar else float(np.max(np.abs(a - b)))
        if d > _AGREEMENT_ATOL:
            return False
    return True


class _TrialStream:
    """One Philox generator, rewound per trial instead of rebuilt.

    Rewinding to key (master_seed, trial_index) with a zero counter and an
    empty buffer reproduces a freshly constructed generator bit for bit;
    reuse only saves the construction overhead in campaign loops.
    """

    __slots__ = ("_bits", "_template", "gen")

    def __init__(self):
        self._bits = np.random.Philox(key=[0, 0])
        self._template = self._bits.state
        self.gen = np.random.Generator(self._bits)

    def rewind(self, master_seed: int, trial_index: int) -> np.random.Generator:
        st = self._template
        st["state"]["key"][0] = master_seed
        st["state"]["key"][1] = trial_index
        st["state"]["counter"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bits.state = st
        return self.gen


def _simulate_pair(cfg: SchemeConfig, trial_index: int, rng=None):
    """Run real and coupled systems of both scheme copies on shared draws."""
    if not isinstance(trial_index, int) or not (0 <= trial_index < _MAX_TRIAL_INDEX):
        raise ValueError(f"trial_index must be an integer in [0, 2**63), "
                         f"got {trial_index!r}")
    p = cfg.params
    n = cfg.dimension
    k_rounds = cfg.rounds
    if rng is None:
        rng = np.random.Generator(np.random.Philox(key=[cfg.master_seed, trial_index]))

    # frozen draw order: messages, forward noise, feedback noise, dithers
    # (zero-size draws consume no generator state, so they are skipped)
    msgs = rng.integers(0, cfg.m_codewords, size=2)
    sig = math.sqrt(p.sigma2)
    sig_t = math.sqrt(p.sigma2_tilde)
    z_fwd = sig * rng.standard_normal((2, k_rounds, n))
    if k_rounds > 1:
        z_fb = sig_t * rng.standard_normal((2, k_rounds - 1, n))
        dith_u = rng.random((2, k_rounds - 1, n))
    else:
        z_fb = np.zeros((2, 0, n))
        dith_u = np.zeros((2, 0, n))

    scalar = n == 1 and cfg.lattice.family == "cubic"
    outcomes = []
    for i in range(2):
        theta = cfg.codewords[msgs[i]]
        if scalar:
            spacing = cfg.lattice.scale
            raw = spacing * dith_u[i, :, 0]
            dith = raw - spacing * np.ceil(raw / spacing - 0.5)
            zf = z_fwd[i, :, 0].tolist()
            zb = z_fb[i, :, 0].tolist()
            real = _run_copy_scalar(cfg, theta, zf, zb, dith, True)
            coupled = _run_copy_scalar(cfg, theta, zf, zb, dith, False)
        else:
            dith = [modulo(cfg.lattice, dith_u[i, k] @ cfg.lattice.generator)
                    for k in range(k_rounds - 1)]
            real = _run_copy_vector(cfg, theta, z_fwd[i], z_fb[i], dith, True)
            coupled = _run_copy_vector(cfg, theta, z_fwd[i], z_fb[i], dith, False)
        outcomes.append((int(msgs[i]), real, coupled, scalar))
    return outcomes


def _to_record(cfg, trial_index, outcomes, system: str) -> TrialRecord:
    sends_ff = cfg.rounds * cfg.dimension
    sends_fb = (cfg.rounds - 1) * cfg.dimension
    ff = 0.0
    fb = 0.0
    flags = []
    firsts = []
    dec = []
    agree = True
    for msg, real, coupled, scalar in outcomes:
        out = real if system == "real" else coupled
        flags.append(tuple(out.flags))
        firsts.append(out.first_alias)
        dec.append(out.decoded == msg)
        ff += out.ff_sq
        fb += out.fb_sq
        agree = agree and _paths_agree(real, coupled, scalar)
    return TrialRecord(
        trial_index=trial_index,
        system=system,
        aliasing_flags=tuple(flags),
        first_aliasing_round=tuple(firsts),
        decode_success=tuple(dec),
        ff_power=ff / (2 * sends_ff),
        fb_power=fb / (2 * sends_fb) if sends_fb else 0.0,
        coupled_agreement=agree,
    )


def run_trial(config: SchemeConfig, trial_index: int) -> TrialRecord:
    """Simulate one trial of the real (power-respecting) system."""
    return _to_record(config, trial_index, _simulate_pair(config, trial_index), "real")


def run_coupled_trial(config: SchemeConfig, trial_index: int) -> TrialRecord:
    """Simulate one trial of the modulo-free coupled system on the same draws."""
    return _to_record(
        config, trial_index, _simulate_pair(config, trial_index), "coupled"
    )


# =============================================================================
# AGGREGATION
# =============================================================================

def wilson_interval(successes: int, total: int) -> tuple[float, float]:
    """Wilson-score 95% interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    z2 = Z95 * Z95
    phat = successes / total
    denom = 1.0 + z2 / total
    center = (phat + z2 / (2.0 * total)) / denom
    half = (
        Z95
        * math.sqrt(phat * (1.0 - phat) / total + z2 / (4.0 * total * total))
        / denom
    )
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == total else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregate frequencies of a campaign, with Wilson 95% intervals.

    Aliasing rates come from the coupled system (whose rounds are all
    jointly Gaussian and hence comparable to the analysis); by the exact
    sample-path coupling the union of aliasing events is identical in the
    real system.  ``p_dec`` is the coupled system's decode error rate,
    ``p_e`` the real system's.  ``sigma_k2_hat`` estimates the final
    estimation-error variance from real-system trials without aliasing,
    pooling dimensions (``no_alias_dims`` of them).

    ``union_agreement`` and ``coupled_agreement`` count copies, out of
    ``2 * trials``: the first counts matching union-of-aliasing indicators
    between the real and coupled runs, the second counts estimate paths
    that coincide numerically up to the first aliasing event.
    """

    trials: int
    rounds: int
    p_mod: tuple[tuple[float, ...], ...]
    p_mod_ci: tuple[tuple[tuple[float, float], ...], ...]
    p_mod_total: float
    p_dec: float
    p_dec_ci: tuple[float, float]
    p_e: float
    p_e_ci: tuple[float, float]
    ff_power: float
    fb_power: float
    union_agreement: int
    coupled_agreement: int
    sigma_k2_hat: float
    no_alias_dims: int
    union_bound_ok: bool
    realized_rate_bits: float


def estimate_error_prob(config: SchemeConfig, trials: int) -> SimulationSummary:
    """Run ``trials`` independent trials and aggregate the error statistics.

    Counters are reduced in trial order; because every trial derives its
    own stream from (master_seed, trial_index), the aggregate is a pure
    function of (config, trials).  The union-bound flag checks the real
    decode error rate against the coupled rate plus all aliasing rates,
    with three Wilson half-widths of slack.
    """
    if not isinstance(trials, int) or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    k_rounds = config.rounds
    steps = k_rounds - 1
    n = config.dimension

    alias_counts = [[0] * steps for _ in range(2)]
    dec_err_coupled = 0
    dec_err_real = 0
    union_mismatch = 0
    agreement = 0
    ff_sum = 0.0
    fb_sum = 0.0
    eps2_sum = 0.0
    no_alias = 0

    stream = _TrialStream()
    for t in range(trials):
        outcomes = _simulate_pair(
            config, t, stream.rewind(config.master_seed, t)
        )
        for i, (msg, real, coupled, scalar) in enumerate(outcomes):
            for k in range(steps):
                if coupled.flags[k]:
                    alias_counts[i][k] += 1
            if coupled.decoded != msg:
                dec_err_coupled += 1
            if real.decoded != msg:
                dec_err_real += 1
            if any(real.flags) != any(coupled.flags):
                union_mismatch += 1
            if not any(real.flags):
                eps2_sum += real.eps_final
                no_alias += 1
            ff_sum += real.ff_sq
            fb_sum += real.fb_sq
            if _paths_agree(real, coupled, scalar):
                agreement += 1

    copies = 2 * trials
    p_mod = tuple(
        tuple(alias_counts[i][k] / trials for k in range(steps)) for i in range(2)
    )
    p_mod_ci = tuple(
        tuple(wilson_interval(alias_counts[i][k], trials) for k in range(steps))
        for i in range(2)
    )
    p_dec = dec_err_coupled / copies
    p_e = dec_err_real / copies
    p_dec_ci = wilson_interval(dec_err_coupled, copies)
    p_e_ci = wilson_interval(dec_err_real, copies)

    slack = (p_e_ci[1] - p_e_ci[0]) / 2.0 + (p_dec_ci[1] - p_dec_ci[0]) / 2.0
    total_mod = 0.0
    for i in range(2):
        for k in range(steps):
            total_mod += p_mod[i][k]
            lo, hi = p_mod_ci[i][k]
            slack += (hi - lo) / 2.0
    union_ok = p_e <= p_dec + total_mod + 3.0 * slack

    return SimulationSummary(
        trials=trials,
        rounds=k_rounds,
        p_mod=p_mod,
        p_mod_ci=p_mod_ci,
        p_mod_total=total_mod,
        p_dec=p_dec,
        p_dec_ci=p_dec_ci,
        p_e=p_e,
        p_e_ci=p_e_ci,
        ff_power=ff_sum / (copies * k_rounds * n),
        fb_power=fb_sum / (copies * steps * n) if steps else 0.0,
        union_agreement=copies - union_mismatch,
        coupled_agreement=agreement,
        sigma_k2_hat=eps2_sum / (no_alias * n) if no_alias else math.nan,
        no_alias_dims=no_alias * n,
        union_bound_ok=union_ok,
        realized_rate_bits=config.realized_rate_bits,
    )

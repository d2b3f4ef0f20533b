"""Error exponents of AWGN communication with noisy AWGN feedback.

The package has two halves.  The analytical half computes classical
no-feedback exponents (sphere packing, random coding, expurgation), the
unconstrained-lattice exponent, and the achievable exponent of an interactive
feedback scheme, together with its high-SNR closed forms.  The simulation
half runs the scheme itself: modulo-lattice feedback transport over a noisy
backward link, coupled against an idealized twin to isolate aliasing events.
"""

from .exponents import (
    ExponentRegion,
    RegionBoundaries,
    capacity,
    critical_rate,
    expurgation_exp,
    expurgation_rate,
    gallager_exp,
    poltyrev_exponent,
    random_coding_exp,
    rate_nats,
    region_boundaries,
    sphere_packing_exp,
)
from .feedback import (
    Binding,
    ChannelParams,
    FeedbackExponentResult,
    balance_looseness,
    e_fb,
    effective_snr,
    eta,
    high_snr_bound,
    kstar_zero_rate,
    out_of_region_exponent,
    region_assumptions_hold,
)
from .jscc import JsccParams, wz_encode, wz_receive
from .lattices import (
    Lattice,
    cubic_lattice,
    d4_lattice,
    e8_lattice,
    looseness_to_vnr,
    make_lattice,
    modulo,
    quantize_nn,
    sample_dither,
    scale_to_power,
    vnr,
)
from .sim import (
    SchemeConfig,
    SimulationSummary,
    TrialRecord,
    estimate_error_prob,
    run_coupled_trial,
    run_trial,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "Binding",
    "ChannelParams",
    "ExponentRegion",
    "FeedbackExponentResult",
    "JsccParams",
    "Lattice",
    "RegionBoundaries",
    "SchemeConfig",
    "SimulationSummary",
    "TrialRecord",
    "balance_looseness",
    "capacity",
    "critical_rate",
    "cubic_lattice",
    "d4_lattice",
    "e8_lattice",
    "e_fb",
    "effective_snr",
    "estimate_error_prob",
    "eta",
    "expurgation_exp",
    "expurgation_rate",
    "gallager_exp",
    "high_snr_bound",
    "kstar_zero_rate",
    "looseness_to_vnr",
    "make_lattice",
    "modulo",
    "out_of_region_exponent",
    "poltyrev_exponent",
    "quantize_nn",
    "random_coding_exp",
    "rate_nats",
    "region_assumptions_hold",
    "region_boundaries",
    "run_coupled_trial",
    "run_trial",
    "sample_dither",
    "scale_to_power",
    "sphere_packing_exp",
    "vnr",
    "wilson_interval",
    "wz_encode",
    "wz_receive",
    "__version__",
]

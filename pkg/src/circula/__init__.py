"""Pair-circula models for multivariate circular time series."""
from .circular import (
    RHO_CAP,
    WrappedCauchy,
    resultant_length,
    wc_cdf,
    wc_cdf0,
    wc_density,
    wc_quantile,
    wrap_angle,
)
from .estimation import ChainSummary, McmcConfig, fit, log_posterior, map_estimate, run_chain
from .pair import (
    INDEPENDENCE,
    PairCirculaSpec,
    h_given_first,
    h_given_second,
    h_inverse_given_first,
    h_inverse_given_second,
    pc_dependence,
    pc_density,
)
from .vine import (
    CircularSeries,
    ModelSpec,
    circula_log_density,
    deuniformize,
    joint_log_density,
    simulate,
    tie_lookup,
    transition_log_density,
    uniformize,
)

__version__ = "0.1.0"

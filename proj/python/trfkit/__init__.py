"""Tweet-retweet-follow simulation and analysis."""

from ._core import (
    Event,
    Graph,
    TrfError,
    cli,
    detect,
    estimate_p_trf,
    fit_pq,
    is_trf_equilibrium,
    largest_scc_fraction,
    load_log,
    logistic_fit,
    reachable_followees,
    sample,
    scc_sizes,
    simulate,
    trf_closure,
    trf_probability,
)

__version__ = "0.3.0"

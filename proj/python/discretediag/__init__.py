"""Convergence diagnostics for MCMC draws of a categorical variable."""

from ._core import (  # noqa: F401
    DataError,
    Dar1Estimate,
    InsufficientVariationError,
    NumericalError,
    SegmentSet,
    TestOutcome,
    billingsley_boot_test,
    billingsley_test,
    bootstrap_pvalue,
    chi_squared_sf,
    darboot_test,
    decode,
    encode,
    estimate_dar1,
    hangartner_test,
    kappa_hat,
    mcboot_test,
    read_chain_csv,
    regularized_gamma_p,
    regularized_gamma_q,
    run_between,
    run_sequential,
    run_within,
    simulate_dar1,
    simulate_markov,
    simulate_ndarma,
    split_within,
    weiss_test,
)

__version__ = "0.1.0"

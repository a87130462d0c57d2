"""Bayesian multiresolution test of (conditional) independence."""

from ._bmit import (
    DataError,
    kendall_tau,
    log_upsilon,
    multires_test,
    polya_urn_loglik,
    posterior_conditional_fixed,
    posterior_independence_fixed,
    spearman,
    synth,
)

__all__ = [
    "DataError",
    "kendall_tau",
    "log_upsilon",
    "multires_test",
    "polya_urn_loglik",
    "posterior_conditional_fixed",
    "posterior_independence_fixed",
    "spearman",
    "synth",
]

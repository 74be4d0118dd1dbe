"""Markov modulated Poisson processes with switching functional forms.

Thin Python wrapper over the C++ core: model simulation, exact MCMC
inference, and a few numeric helpers. See the project README for the config
file format shared with the ``gmmpp`` command-line tool.
"""

from gmmpp._core import (  # noqa: F401
    build_state_map,
    ess,
    expand_q_matrix,
    fit,
    kernel_estimate,
    log_likelihood,
    matrix_exponential,
    norm_cdf,
    norm_quantile,
    simulate,
)

__all__ = [
    "build_state_map",
    "ess",
    "expand_q_matrix",
    "fit",
    "kernel_estimate",
    "log_likelihood",
    "matrix_exponential",
    "norm_cdf",
    "norm_quantile",
    "simulate",
]

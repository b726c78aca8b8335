"""
Tailfit Module - Heavy-Tailed Engagement Distributions

This module handles:
- Empirical CCDFs
- Discrete power-law fits (exact MLE, KS-selected lower bound)
- Exact power-law sampling and KS bootstrap p-values
- Concurrent fits over topic x metric grids
"""

from .ccdf import ccdf, ccdf_frame
from .powerlaw import (
    PowerLawFit,
    bootstrap_pvalue,
    continuous_alpha,
    fit_power_law,
    ks_distance,
    mle_alpha,
    sample_discrete_power_law,
    tail_negative_loglik,
)
from .grid import FIT_COLUMNS, GridFit, fit_grid, fits_to_frame, fits_to_wide

__all__ = [
    "FIT_COLUMNS",
    "GridFit",
    "PowerLawFit",
    "bootstrap_pvalue",
    "ccdf",
    "ccdf_frame",
    "continuous_alpha",
    "fit_grid",
    "fit_power_law",
    "fits_to_frame",
    "fits_to_wide",
    "ks_distance",
    "mle_alpha",
    "sample_discrete_power_law",
    "tail_negative_loglik",
]

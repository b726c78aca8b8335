"""
Ordinal Module - Topic Mobility Regression

This module handles:
- Proportional odds model fitting (number of topics liked vs likes)
- Odds ratios with Wald intervals
- Category prediction and the absolute distance coefficient
- Goodness-of-fit diagnostics per covariate pattern
"""

from .pom import SIGN_CONVENTION, PomFit, ProportionalOddsModel, fit_pom, log_likelihood, score
from .metrics import (
    OddsRatioReport,
    PomDiagnostics,
    absolute_distance_coefficient,
    fit_diagnostics,
    odds_ratio,
    predict_category,
    predict_proba,
    prediction_frame,
)

__all__ = [
    "SIGN_CONVENTION",
    "OddsRatioReport",
    "PomDiagnostics",
    "PomFit",
    "ProportionalOddsModel",
    "absolute_distance_coefficient",
    "fit_diagnostics",
    "fit_pom",
    "log_likelihood",
    "odds_ratio",
    "predict_category",
    "predict_proba",
    "prediction_frame",
    "score",
]

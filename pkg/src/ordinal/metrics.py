"""
Odds ratios, predictions and fit quality for proportional odds models.

Key techniques:
- Category probabilities as differences of cumulative logistics
- Argmax prediction, ties resolved toward the lower category
- Absolute distance coefficient: 1 - sum|pred - actual| / (n (K - 1))
- Goodness of fit against the model saturated per covariate pattern
  (likelihood-ratio G^2 and Pearson chi-square)
"""

from dataclasses import asdict, dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy import stats
from scipy.special import expit

from .pom import PomFit, _as_design


@dataclass(frozen=True)
class OddsRatioReport:
    """exp(beta) with its Wald interval."""
    or_value: float
    ci_low: float
    ci_high: float
    level: float = 0.95

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class PomDiagnostics:
    """Goodness of fit of a PomFit against the per-pattern saturated model."""
    deviance: float
    p_value: float
    pearson_chi2: float
    pearson_p_value: float
    df: int
    n_patterns: int
    minus_two_loglik: float
    reliable: bool

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def odds_ratio(fit: PomFit, level: float = 0.95, index: int = 0) -> OddsRatioReport:
    """
    Odds ratio of a one-unit increase in covariate ``index``.

    The interval is exp(beta +/- z * SE); without standard errors it
    collapses onto the point estimate.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    beta = float(fit.coefficients[index])
    n_cut = fit.K - 1
    se = float(fit.standard_errors[n_cut + index]) if fit.standard_errors.size else 0.0
    z = stats.norm.ppf(0.5 + level / 2.0)
    return OddsRatioReport(
        or_value=float(np.exp(beta)),
        ci_low=float(np.exp(beta - z * se)),
        ci_high=float(np.exp(beta + z * se)),
        level=level,
    )


def _covariates(fit: PomFit, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if fit.coefficients.size > 1 and arr.ndim == 1:
        arr = arr[None, :]
    X = _as_design(arr)
    return np.log1p(X) if fit.log_transform else X


def _proba(fit: PomFit, X: np.ndarray) -> np.ndarray:
    eta = X @ fit.coefficients
    cumulative = expit(fit.intercepts[None, :] - eta[:, None])
    n = eta.size
    padded = np.hstack([np.zeros((n, 1)), cumulative, np.ones((n, 1))])
    return np.diff(padded, axis=1)


def predict_proba(fit: PomFit, x) -> np.ndarray:
    """
    Category probabilities, shape (n, K).

    P(Y = j) = F(alpha_j - x.beta) - F(alpha_{j-1} - x.beta), alpha_0 = -inf,
    alpha_K = +inf.
    """
    return _proba(fit, _covariates(fit, x))


def predict_category(fit: PomFit, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    Probabilities and the most probable category (1..K) per observation.

    np.argmax returns the first maximum, so ties go to the lower category.
    """
    proba = predict_proba(fit, x)
    return proba, np.argmax(proba, axis=1) + 1


def absolute_distance_coefficient(predicted: Sequence[int], actual: Sequence[int], K: int) -> float:
    """
    1 - sum|predicted - actual| / (n (K - 1)).

    1 when every prediction is exact, 0 when every one is maximally wrong.
    """
    pred = np.asarray(predicted, dtype=np.int64)
    real = np.asarray(actual, dtype=np.int64)
    if pred.shape != real.shape:
        raise ValueError(f"length mismatch: {pred.size} predictions for {real.size} observations")
    if pred.size == 0:
        raise ValueError("need at least one observation")
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    for name, values in (("predicted", pred), ("actual", real)):
        if values.min() < 1 or values.max() > K:
            raise ValueError(f"{name} categories must lie in 1..{K}")
    return float(1.0 - np.abs(pred - real).sum() / (pred.size * (K - 1)))


def fit_diagnostics(fit: PomFit, x, y) -> PomDiagnostics:
    """
    Residual deviance and chi-square goodness of fit.

    Observations are grouped by distinct covariate pattern; observed
    category counts are compared with the fitted expectations. Degrees of
    freedom are patterns * (K - 1) minus the number of parameters; when that
    is not positive the diagnostics are flagged unreliable and p-values are NaN.
    """
    X = _covariates(fit, x)
    y = np.asarray(y, dtype=np.int64)
    K = fit.K
    if y.size != X.shape[0]:
        raise ValueError(f"x has {X.shape[0]} rows but y has {y.size} values")

    patterns, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    n_patterns = patterns.shape[0]
    observed = np.zeros((n_patterns, K))
    np.add.at(observed, (inverse, y - 1), 1.0)
    totals = observed.sum(axis=1, keepdims=True)

    proba = _proba(fit, patterns)
    expected = totals * proba

    positive = observed > 0
    deviance = float(2.0 * np.sum(observed[positive] * np.log(observed[positive] / expected[positive])))
    with np.errstate(divide="ignore", invalid="ignore"):
        pearson = float(np.nansum((observed - expected) ** 2 / expected))

    minus_two_loglik = float(-2.0 * np.sum(observed[positive] * np.log(proba[positive])))
    df = n_patterns * (K - 1) - (K - 1 + fit.coefficients.size)
    reliable = df > 0
    if reliable:
        p_value = float(stats.chi2.sf(deviance, df))
        pearson_p = float(stats.chi2.sf(pearson, df))
    else:
        p_value = pearson_p = float("nan")
        logger.warning(
            "POM diagnostics unreliable: {} covariate patterns for {} parameters",
            n_patterns, K - 1 + fit.coefficients.size,
        )
    return PomDiagnostics(
        deviance=max(deviance, 0.0),
        p_value=p_value,
        pearson_chi2=pearson,
        pearson_p_value=pearson_p,
        df=int(df),
        n_patterns=int(n_patterns),
        minus_two_loglik=minus_two_loglik,
        reliable=reliable,
    )


def prediction_frame(fit: PomFit, x, y) -> pd.DataFrame:
    """Per-observation probabilities, predicted and actual category."""
    proba, predicted = predict_category(fit, x)
    frame = pd.DataFrame(proba, columns=[f"p{j}" for j in range(1, fit.K + 1)])
    frame.insert(0, "x", _as_design(x)[:, 0])
    frame["predicted"] = predicted
    frame["actual"] = np.asarray(y, dtype=np.int64)
    return frame

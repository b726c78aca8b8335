"""
Kaplan-Meier Estimator

    S(t) = prod_{t_i < t} (n_i - d_i) / n_i

over the distinct observed event times t_i, with n_i units at risk
(duration >= t_i) and d_i events at t_i. The strict bound makes S
left-continuous: S(t_i) is the value *before* the drop at t_i.

Key techniques:
- Tied events handled by multiplicity d_i at a single time
- Greenwood variance with a log(-log) confidence band
- Median survival time
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..errors import DegenerateSampleError
from .lifetimes import LifetimeSample

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SurvivalCurve:
    """Product-limit estimate; ``survival[i]`` is S just after ``event_times[i]``."""
    event_times: np.ndarray
    n_risk: np.ndarray
    events: np.ndarray
    survival: np.ndarray
    group: str = ""
    n: int = 0

    def evaluate(self, t: ArrayLike) -> ArrayLike:
        """Left-continuous S(t); 1 before (and at) the first event time."""
        k = np.searchsorted(self.event_times, np.asarray(t, dtype=float), side="left")
        padded = np.concatenate([[1.0], self.survival])
        out = padded[k]
        return float(out) if np.ndim(out) == 0 else out

    @property
    def median(self) -> Optional[float]:
        """First event time at which S drops to 0.5 or below."""
        below = np.nonzero(self.survival <= 0.5)[0]
        return float(self.event_times[below[0]]) if below.size else None

    def greenwood_variance(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.events / (self.n_risk * (self.n_risk - self.events))
        return self.survival ** 2 * np.cumsum(terms)

    def confidence_band(self, level: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
        """Pointwise log(-log) interval around each step value."""
        if not 0.0 < level < 1.0:
            raise ValueError(f"level must be in (0, 1), got {level}")
        z = stats.norm.ppf(0.5 + level / 2.0)
        s = self.survival
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.events / (self.n_risk * (self.n_risk - self.events))
            se = np.sqrt(np.cumsum(terms)) / np.abs(np.log(s))
            low = s ** np.exp(z * se)
            high = s ** np.exp(-z * se)
        interior = (s > 0) & (s < 1) & np.isfinite(se)
        low = np.where(interior, low, s)
        high = np.where(interior, high, s)
        return low, high

    def check(self, atol: float = 1e-12) -> bool:
        """Recompute the product from the counts and compare."""
        recomputed = np.cumprod((self.n_risk - self.events) / self.n_risk) if self.n_risk.size else self.survival
        monotone = bool(np.all(np.diff(np.concatenate([[1.0], self.survival])) <= atol))
        return monotone and bool(np.allclose(recomputed, self.survival, atol=atol))

    def to_frame(self, level: Optional[float] = 0.95) -> pd.DataFrame:
        """Step points: group,t,s_hat,n_risk,d[,ci_low,ci_high]."""
        frame = pd.DataFrame({
            "group": self.group,
            "t": self.event_times,
            "s_hat": self.survival,
            "n_risk": self.n_risk.astype(int),
            "d": self.events.astype(int),
        })
        if level is not None:
            frame["ci_low"], frame["ci_high"] = self.confidence_band(level)
        return frame


def kaplan_meier(sample: LifetimeSample) -> SurvivalCurve:
    """
    Estimate the survival function of a lifetime sample.

    With no censoring the curve is 1 - ECDF (left-continuous); censored
    units only leave the risk set. A fully censored sample gives S = 1.

    Raises:
        DegenerateSampleError: the sample is empty
    """
    if len(sample) == 0:
        raise DegenerateSampleError("degenerate sample: no durations")
    durations = sample.durations
    times = np.unique(durations[sample.observed])
    sorted_durations = np.sort(durations)
    n_risk = (len(durations) - np.searchsorted(sorted_durations, times, side="left")).astype(float)
    event_durations = np.sort(durations[sample.observed])
    events = (
        np.searchsorted(event_durations, times, side="right")
        - np.searchsorted(event_durations, times, side="left")
    ).astype(float)
    survival = np.cumprod((n_risk - events) / n_risk)
    return SurvivalCurve(
        event_times=times,
        n_risk=n_risk,
        events=events,
        survival=survival,
        group=sample.group,
        n=len(sample),
    )

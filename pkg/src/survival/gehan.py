"""
Weighted Log-Rank Tests (Gehan-Wilcoxon and relatives)

At every pooled event time t the observed events of group g are compared
with their expectation under equal hazards:

    U_g  = sum_t w(t) (d_g(t) - n_g(t) d(t) / n(t))
    V_gh = sum_t w(t)^2 d(t) (n(t) - d(t)) / (n(t) - 1) * n_g/n (delta_gh - n_h/n)

Weights:
- gehan:   w = n(t), the pooled number at risk (Breslow form)
- peto:    w = pooled prod_{s < t} (1 - d(s) / (n(s) + 1))
- logrank: w = 1

Two groups report the signed Z = U_1 / sqrt(V_11); K > 2 groups report
U' V^-1 U on K-1 degrees of freedom. Both use the chi-square reference.
Two-group tests also offer a permutation p-value: exact enumeration for up
to 20 units, seeded Monte Carlo otherwise.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Literal, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import stats

from ..errors import NoEventsError
from ..rng import derive_rng
from .lifetimes import LifetimeSample

Weighting = Literal["gehan", "peto", "logrank"]
TestMethod = Literal["asymptotic", "permutation"]

MAX_EXACT_UNITS = 20
DEFAULT_PERMUTATIONS = 10000
PERMUTATION_BATCH = 4096
# Membership cells per Monte Carlo batch.
MAX_BATCH_CELLS = 1 << 22


@dataclass
class GroupTestResult:
    """Outcome of a weighted log-rank comparison."""
    statistic: float
    p_value: float
    df: int
    weighting: str
    method: str
    groups: List[str] = field(default_factory=list)
    observed: List[float] = field(default_factory=list)
    expected: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "df": self.df,
            "weighting": self.weighting,
            "method": self.method,
            "groups": list(self.groups),
            "observed": list(self.observed),
            "expected": list(self.expected),
        }


@dataclass(frozen=True)
class _RiskSets:
    """
    Pooled risk sets at the distinct event times.

    Units are kept sorted by duration; ``left[t]`` and ``right[t]`` bound the
    units whose duration equals event time t, so group counts at every time
    come from prefix sums over the sorted order.
    """
    order: np.ndarray
    observed_sorted: np.ndarray
    left: np.ndarray
    right: np.ndarray
    weights: np.ndarray
    n: np.ndarray
    d: np.ndarray
    variance_factor: np.ndarray

    @property
    def n_units(self) -> int:
        return self.order.size


def _weights(n: np.ndarray, d: np.ndarray, weighting: str) -> np.ndarray:
    if weighting == "gehan":
        return n.copy()
    if weighting == "logrank":
        return np.ones_like(n)
    if weighting == "peto":
        factors = 1.0 - d / (n + 1.0)
        return np.concatenate([[1.0], np.cumprod(factors)[:-1]])
    raise ValueError(f"weighting must be 'gehan', 'peto' or 'logrank', got {weighting!r}")


def _risk_sets(durations: np.ndarray, observed: np.ndarray, weighting: str) -> _RiskSets:
    order = np.argsort(durations, kind="stable")
    sorted_durations = durations[order]
    observed_sorted = observed[order].astype(float)
    times = np.unique(durations[observed])
    left = np.searchsorted(sorted_durations, times, side="left")
    right = np.searchsorted(sorted_durations, times, side="right")
    events_prefix = np.concatenate([[0.0], np.cumsum(observed_sorted)])

    n = (durations.size - left).astype(float)
    d = events_prefix[right] - events_prefix[left]
    w = _weights(n, d, weighting)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(n > 1, w ** 2 * d * (n - d) / (n - 1), 0.0)
    return _RiskSets(order, observed_sorted, left, right, w, n, d, factor)


def _group_counts(risk: _RiskSets, membership: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """At-risk and event counts per event time for each row of a 0/1 membership matrix."""
    m = membership[:, risk.order]
    zeros = np.zeros((m.shape[0], 1))
    at_risk_prefix = np.concatenate([zeros, np.cumsum(m, axis=1)], axis=1)
    events_prefix = np.concatenate([zeros, np.cumsum(m * risk.observed_sorted, axis=1)], axis=1)
    n_g = at_risk_prefix[:, -1:] - at_risk_prefix[:, risk.left]
    d_g = events_prefix[:, risk.right] - events_prefix[:, risk.left]
    return n_g, d_g


def _z_scores(risk: _RiskSets, membership: np.ndarray) -> np.ndarray:
    """Signed Z of group 1 for each row of a 0/1 membership matrix."""
    n1, d1 = _group_counts(risk, membership)
    frac = n1 / risk.n
    u = (risk.weights * (d1 - frac * risk.d)).sum(axis=1)
    v = (risk.variance_factor * frac * (1.0 - frac)).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(v > 0, u / np.sqrt(np.where(v > 0, v, 1.0)), 0.0)
    return z


def _pool(samples: Sequence[LifetimeSample]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(samples) < 2:
        raise ValueError(f"need at least 2 groups, got {len(samples)}")
    for i, s in enumerate(samples):
        if len(s) == 0:
            raise ValueError(f"group {s.group or i!r} is empty")
        if s.n_events == 0:
            raise NoEventsError(s.group or str(i))
    durations = np.concatenate([s.durations for s in samples])
    observed = np.concatenate([s.observed for s in samples])
    labels = np.concatenate([np.full(len(s), g) for g, s in enumerate(samples)])
    return durations, observed, labels


def _permutation_pvalue(risk: _RiskSets, n1: int, z_obs: float, n_permutations: int, seed: int) -> float:
    n_units = risk.n_units
    tol = 1e-10 * max(1.0, abs(z_obs))
    if n_units <= MAX_EXACT_UNITS:
        assignments = list(combinations(range(n_units), n1))
        membership = np.zeros((len(assignments), n_units))
        for row, idx in enumerate(assignments):
            membership[row, list(idx)] = 1.0
        z = _z_scores(risk, membership)
        return float(np.mean(np.abs(z) >= abs(z_obs) - tol))

    rng = derive_rng(seed, "survtest-permutation")
    exceed = 0
    done = 0
    base = np.zeros(n_units)
    base[:n1] = 1.0
    batch_size = max(1, min(PERMUTATION_BATCH, MAX_BATCH_CELLS // n_units))
    while done < n_permutations:
        batch = min(batch_size, n_permutations - done)
        membership = rng.permuted(np.tile(base, (batch, 1)), axis=1)
        exceed += int(np.sum(np.abs(_z_scores(risk, membership)) >= abs(z_obs) - tol))
        done += batch
    return (exceed + 1) / (n_permutations + 1)


def gehan_wilcoxon(
    samples: Sequence[LifetimeSample],
    weighting: Weighting = "gehan",
    method: TestMethod = "asymptotic",
    n_permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> GroupTestResult:
    """
    Compare lifetime distributions across groups.

    Args:
        samples: One LifetimeSample per group (at least two)
        weighting: "gehan" (default), "peto" or "logrank"
        method: "asymptotic" chi-square, or "permutation" (two groups only)
        n_permutations: Monte Carlo permutations when exact enumeration is
            too large
        seed: Seed for Monte Carlo permutations

    Returns:
        GroupTestResult; ``statistic`` is the signed Z for two groups and the
        chi-square statistic otherwise

    Raises:
        NoEventsError: a group has no observed event
    """
    if method not in ("asymptotic", "permutation"):
        raise ValueError(f"method must be 'asymptotic' or 'permutation', got {method!r}")
    durations, observed, labels = _pool(samples)
    risk = _risk_sets(durations, observed, weighting)
    k = len(samples)

    membership = np.stack([(labels == g).astype(float) for g in range(k)])
    n_g, d_g = _group_counts(risk, membership)
    frac = n_g / risk.n
    u = (risk.weights * (d_g - frac * risk.d)).sum(axis=1)
    expected = (frac * risk.d).sum(axis=1)

    names = [s.group or str(i) for i, s in enumerate(samples)]
    if k == 2:
        z = float(_z_scores(risk, membership[:1])[0])
        statistic = z
        p_value = float(stats.chi2.sf(z * z, 1))
        if method == "permutation":
            p_value = _permutation_pvalue(risk, len(samples[0]), z, n_permutations, seed)
    else:
        if method == "permutation":
            raise ValueError("permutation p-values are available for two groups only")
        v = np.empty((k, k))
        for g in range(k):
            for h in range(k):
                delta = 1.0 if g == h else 0.0
                v[g, h] = (risk.variance_factor * frac[g] * (delta - frac[h])).sum()
        u_r, v_r = u[:-1], v[:-1, :-1]
        try:
            statistic = float(u_r @ np.linalg.solve(v_r, u_r))
        except np.linalg.LinAlgError:
            statistic = float(u_r @ np.linalg.pinv(v_r) @ u_r)
        p_value = float(stats.chi2.sf(statistic, k - 1))

    result = GroupTestResult(
        statistic=statistic,
        p_value=min(1.0, max(0.0, p_value)),
        df=k - 1,
        weighting=weighting,
        method=method,
        groups=names,
        observed=[float(x) for x in d_g.sum(axis=1)],
        expected=[float(x) for x in expected],
    )
    logger.info(
        "{} test over {} groups: statistic={:.4f} p={:.4g}",
        weighting.capitalize(), k, result.statistic, result.p_value,
    )
    return result

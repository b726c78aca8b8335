"""
Tests for the Survival Module.

Covers lifetime extraction with censoring, the Kaplan-Meier estimator and
weighted log-rank comparisons.
"""
import tracemalloc

import numpy as np
import pytest
from scipy import stats

from src.attribution import classify_users
from src.errors import DegenerateSampleError, EmptyScopeError, NoEventsError
from src.rng import derive_rng
from src.survival import (
    LifetimeSample,
    gehan_wilcoxon,
    kaplan_meier,
    lifetimes,
    lifetimes_by_topic,
)
from src.survival.gehan import _group_counts, _risk_sets

SAMPLE_LABELS = {
    "p1": "environment",
    "p2": "health",
    "p3": "diet",
    "p4": "geopolitics",
    "p5": "unlabeled",
    "p7": "unlabeled",
    "p8": "diet",
}


def _sample(durations, observed=None, group="") -> LifetimeSample:
    durations = np.asarray(durations, dtype=float)
    if observed is None:
        observed = np.ones(durations.size, dtype=bool)
    return LifetimeSample(durations, np.asarray(observed, dtype=bool), group=group)


@pytest.fixture
def censored_sample() -> LifetimeSample:
    return _sample([1, 2, 2, 3, 4, 4, 5, 6, 7, 8], [1, 1, 0, 1, 1, 1, 0, 1, 0, 1])


# =============================================================================
# TESTS - LIFETIMES
# =============================================================================

def test_post_lifetimes_in_scope(sample_corpus):
    """Test first-to-last comment spans of posts in one topic."""
    sample = lifetimes(sample_corpus, SAMPLE_LABELS, unit="post", scope="geopolitics")
    assert sample.units == ["p4"]
    assert sample.durations.tolist() == [8000.0]
    assert sample.observed.tolist() == [True]
    assert sample.group == "geopolitics"


def test_post_lifetimes_all_posts(sample_corpus):
    """Test that posts with fewer than two comments live for 0 seconds."""
    sample = lifetimes(sample_corpus, SAMPLE_LABELS, unit="post")
    assert sample.group == "all"
    assert dict(zip(sample.units, sample.durations.tolist())) == {
        "p1": 4000.0, "p2": 0.0, "p3": 0.0, "p4": 8000.0,
        "p5": 0.0, "p6": 0.0, "p7": 0.0, "p8": 0.0,
    }


def test_user_lifetimes(sample_corpus):
    """Test user spans over comments on posts of one topic."""
    sample = lifetimes(sample_corpus, SAMPLE_LABELS, unit="user", scope="geopolitics")
    assert sample.units == ["u3", "u4"]
    assert sample.durations.tolist() == [8000.0, 0.0]


def test_user_lifetimes_polarized_only(sample_corpus):
    """Test that profiles restrict user lifetimes to polarized users."""
    profiles = classify_users(sample_corpus, SAMPLE_LABELS)
    sample = lifetimes(sample_corpus, SAMPLE_LABELS, unit="user", scope="geopolitics", profiles=profiles)
    assert sample.units == ["u3"]


def test_censor_horizon(sample_corpus):
    """Test right-censoring of units active near the window end."""
    geo = lifetimes(sample_corpus, SAMPLE_LABELS, unit="post", scope="geopolitics", censor_horizon=1000)
    env = lifetimes(sample_corpus, SAMPLE_LABELS, unit="post", scope="environment", censor_horizon=1000)
    assert geo.observed.tolist() == [False]
    assert env.observed.tolist() == [True]
    assert geo.n_events == 0


def test_negative_censor_horizon(sample_corpus):
    """Test that the horizon must be non-negative."""
    with pytest.raises(ValueError):
        lifetimes(sample_corpus, SAMPLE_LABELS, censor_horizon=-1)


def test_exclude_zero(sample_corpus):
    """Test dropping zero-length lifetimes."""
    sample = lifetimes(sample_corpus, SAMPLE_LABELS, unit="post", exclude_zero=True)
    assert sample.units == ["p1", "p4"]
    with pytest.raises(EmptyScopeError):
        lifetimes(sample_corpus, SAMPLE_LABELS, unit="post", scope="health", exclude_zero=True)


def test_empty_scope(sample_corpus):
    """Test that a scope without units is an error."""
    with pytest.raises(EmptyScopeError):
        lifetimes(sample_corpus, SAMPLE_LABELS, unit="user", scope="diet")


def test_invalid_unit(sample_corpus):
    """Test that only posts and users have lifetimes."""
    with pytest.raises(ValueError):
        lifetimes(sample_corpus, SAMPLE_LABELS, unit="page")


def test_lifetimes_by_topic_skips_empty(sample_corpus):
    """Test that topics without units are skipped."""
    samples = lifetimes_by_topic(
        sample_corpus, SAMPLE_LABELS, ["environment", "health", "diet", "geopolitics"], unit="user"
    )
    assert list(samples) == ["environment", "health", "geopolitics"]
    assert samples["environment"].units == ["u1", "u5"]


def test_lifetime_sample_validation():
    """Test the invariants of a lifetime sample."""
    with pytest.raises(ValueError):
        LifetimeSample(np.array([1.0, -2.0]), np.array([True, True]))
    with pytest.raises(ValueError):
        LifetimeSample(np.array([1.0, 2.0]), np.array([True]))


def test_lifetime_sample_pairs():
    """Test the (duration, observed) pair view."""
    sample = LifetimeSample.from_pairs([(3.0, True), (5.0, False)], group="diet")
    assert sample.pairs() == [(3.0, True), (5.0, False)]
    assert sample.n_events == 1
    assert list(sample.to_frame().columns) == ["group", "unit", "duration", "observed"]


def test_lifetimes_match_planted(synthetic_corpus, synthetic_ledger):
    """Test that user lifetimes equal the planted first-to-last spans."""
    topics = list(synthetic_ledger.user_lifetime_topics.values())
    if not topics:
        pytest.skip("no commenters planted")
    topic = max(sorted(set(topics)), key=topics.count)
    sample = lifetimes(synthetic_corpus, synthetic_ledger.post_topics, unit="user", scope=topic)
    planted = {
        u: d for u, d in synthetic_ledger.user_lifetimes.items()
        if synthetic_ledger.user_lifetime_topics[u] == topic
    }
    assert dict(zip(sample.units, sample.durations.tolist())) == planted


# =============================================================================
# TESTS - KAPLAN-MEIER
# =============================================================================

def test_kaplan_meier_censored(censored_sample):
    """Test the product-limit estimate with ties and censoring."""
    curve = kaplan_meier(censored_sample)
    assert curve.event_times.tolist() == [1, 2, 3, 4, 6, 8]
    assert curve.n_risk.tolist() == [10, 9, 7, 6, 3, 1]
    assert curve.events.tolist() == [1, 1, 1, 2, 1, 1]
    np.testing.assert_allclose(curve.survival, [0.9, 0.8, 24 / 35, 16 / 35, 32 / 105, 0.0])
    assert curve.check()


def test_kaplan_meier_left_continuous(censored_sample):
    """Test that S(t) at an event time is the value before the drop."""
    curve = kaplan_meier(censored_sample)
    assert curve.evaluate(0.5) == 1.0
    assert curve.evaluate(1.0) == 1.0
    assert curve.evaluate(4.0) == pytest.approx(24 / 35)
    assert curve.evaluate(4.5) == pytest.approx(16 / 35)
    np.testing.assert_allclose(curve.evaluate(np.array([1.5, 9.0])), [0.9, 0.0])


def test_kaplan_meier_uncensored_is_ecdf_complement():
    """Test that without censoring S is one minus the empirical CDF."""
    curve = kaplan_meier(_sample([1, 2, 3]))
    assert curve.evaluate(1.5) == pytest.approx(2 / 3)
    assert curve.evaluate(2.5) == pytest.approx(1 / 3)
    assert curve.evaluate(3.5) == 0.0


def test_kaplan_meier_median(censored_sample):
    """Test the median survival time."""
    assert kaplan_meier(censored_sample).median == 4.0
    assert kaplan_meier(_sample([5, 6, 7], [True, False, False])).median is None


def test_kaplan_meier_fully_censored():
    """Test that a sample without events keeps S at 1."""
    curve = kaplan_meier(_sample([3, 4], [False, False]))
    assert curve.event_times.size == 0
    assert curve.evaluate(100.0) == 1.0


def test_kaplan_meier_empty():
    """Test that an empty sample is degenerate."""
    with pytest.raises(DegenerateSampleError):
        kaplan_meier(_sample([]))


def test_confidence_band_brackets_estimate(censored_sample):
    """Test that the band contains the step values."""
    curve = kaplan_meier(censored_sample)
    low, high = curve.confidence_band(0.95)
    assert np.all(low <= curve.survival + 1e-12)
    assert np.all(high >= curve.survival - 1e-12)
    assert np.all((low >= 0) & (high <= 1))
    with pytest.raises(ValueError):
        curve.confidence_band(1.0)


def test_greenwood_variance_first_step(censored_sample):
    """Test Greenwood's formula at the first event time."""
    variance = kaplan_meier(censored_sample).greenwood_variance()
    assert variance[0] == pytest.approx(0.81 * (1.0 / (10 * 9)))


def test_survival_frame(censored_sample):
    """Test the step-point table."""
    frame = kaplan_meier(_sample([1, 2, 3], group="diet")).to_frame()
    assert list(frame.columns) == ["group", "t", "s_hat", "n_risk", "d", "ci_low", "ci_high"]
    assert frame["group"].unique().tolist() == ["diet"]
    assert list(kaplan_meier(censored_sample).to_frame(level=None).columns) == ["group", "t", "s_hat", "n_risk", "d"]


# =============================================================================
# TESTS - GROUP COMPARISONS
# =============================================================================

def test_gehan_two_groups_asymptotic():
    """Test the signed statistic on fully separated groups."""
    result = gehan_wilcoxon([_sample([1, 2, 3], group="a"), _sample([100, 200, 300], group="b")])
    assert result.statistic == pytest.approx(9.0 / np.sqrt(18.0))
    assert result.p_value == pytest.approx(0.0339, abs=1e-4)
    assert result.df == 1
    assert result.groups == ["a", "b"]


def test_gehan_sign_flips_with_group_order():
    """Test that swapping groups negates the statistic."""
    early, late = _sample([1, 2, 3]), _sample([100, 200, 300])
    forward = gehan_wilcoxon([early, late])
    backward = gehan_wilcoxon([late, early])
    assert backward.statistic == pytest.approx(-forward.statistic)
    assert backward.p_value == pytest.approx(forward.p_value)


def test_gehan_exact_permutation():
    """Test exact enumeration of group assignments for small samples."""
    result = gehan_wilcoxon(
        [_sample([1, 2, 3]), _sample([100, 200, 300])], method="permutation"
    )
    assert result.p_value == pytest.approx(0.1)
    assert result.method == "permutation"


def test_gehan_monte_carlo_permutation():
    """Test seeded Monte Carlo permutations for larger samples."""
    rng = np.random.default_rng(0)
    a = _sample(rng.exponential(1.0, 15))
    b = _sample(rng.exponential(3.0, 15))
    first = gehan_wilcoxon([a, b], method="permutation", n_permutations=500, seed=9)
    second = gehan_wilcoxon([a, b], method="permutation", n_permutations=500, seed=9)
    assert first.p_value == second.p_value
    assert 1.0 / 501 <= first.p_value <= 1.0


def test_gehan_identical_groups():
    """Test that identical samples give Z = 0 and p = 1."""
    result = gehan_wilcoxon([_sample([1, 2, 3]), _sample([1, 2, 3])])
    assert result.statistic == pytest.approx(0.0)
    assert result.p_value == pytest.approx(1.0)


@pytest.mark.parametrize("weighting", ["gehan", "peto", "logrank"])
def test_weightings_agree_on_direction(weighting):
    """Test that every weighting ranks the early group first."""
    result = gehan_wilcoxon(
        [_sample([1, 2, 3, 4], [1, 1, 0, 1]), _sample([10, 20, 30, 40])], weighting=weighting
    )
    assert result.statistic > 0
    assert result.weighting == weighting


def test_k_group_test():
    """Test the chi-square statistic over more than two groups."""
    samples = [_sample([1, 2, 3], group="a"), _sample([4, 5, 6], group="b"), _sample([7, 8, 9], group="c")]
    result = gehan_wilcoxon(samples)
    assert result.df == 2
    assert result.statistic > 0
    assert 0.0 <= result.p_value < 0.05
    assert sum(result.observed) == pytest.approx(sum(result.expected))


def test_k_group_permutation_rejected():
    """Test that permutation p-values need exactly two groups."""
    samples = [_sample([1, 2]), _sample([3, 4]), _sample([5, 6])]
    with pytest.raises(ValueError):
        gehan_wilcoxon(samples, method="permutation")


def test_group_without_events():
    """Test that a fully censored group is rejected."""
    with pytest.raises(NoEventsError, match="late"):
        gehan_wilcoxon([_sample([1, 2]), _sample([3, 4], [False, False], group="late")])


def test_invalid_arguments():
    """Test weighting, method and group-count validation."""
    a, b = _sample([1, 2]), _sample([3, 4])
    with pytest.raises(ValueError):
        gehan_wilcoxon([a, b], weighting="fleming")
    with pytest.raises(ValueError):
        gehan_wilcoxon([a, b], method="bayes")
    with pytest.raises(ValueError):
        gehan_wilcoxon([a])


def test_short_and_long_lifetimes_differ():
    """Test that exponential lifetimes with distinct means are told apart."""
    rng = derive_rng(21, "lifetimes")
    short = _sample(rng.exponential(7.0, 80), group="diet")
    long = _sample(rng.exponential(30.0, 80), group="geopolitics")
    result = gehan_wilcoxon([short, long])
    assert result.statistic > 0
    assert result.p_value < 1e-3


def test_risk_set_counts_match_direct_tally():
    """Test prefix-sum risk sets against a direct count with ties and censoring."""
    durations = np.array([5.0, 1.0, 3.0, 3.0, 8.0, 1.0, 3.0, 6.0, 2.0])
    observed = np.array([1, 1, 0, 1, 1, 0, 1, 0, 1], dtype=bool)
    labels = np.array([0, 1, 0, 1, 1, 0, 0, 1, 1])
    risk = _risk_sets(durations, observed, "gehan")
    membership = np.stack([(labels == g).astype(float) for g in range(2)])
    n_g, d_g = _group_counts(risk, membership)

    times = np.unique(durations[observed])
    for g in range(2):
        mine = labels == g
        np.testing.assert_array_equal(n_g[g], [np.sum(durations[mine] >= t) for t in times])
        np.testing.assert_array_equal(d_g[g], [np.sum((durations[mine] == t) & observed[mine]) for t in times])
    np.testing.assert_array_equal(risk.n, [np.sum(durations >= t) for t in times])
    np.testing.assert_array_equal(risk.d, d_g.sum(axis=0))


def test_gehan_memory_linear_in_units():
    """Test that a large two-group comparison never builds a unit-by-time matrix."""
    rng = derive_rng(5, "large-lifetimes")
    a = _sample(rng.exponential(10.0, 30_000), group="a")
    b = _sample(rng.exponential(12.0, 30_000), group="b")
    tracemalloc.start()
    try:
        result = gehan_wilcoxon([a, b])
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert result.statistic > 0
    assert peak < 64 * 2 ** 20


@pytest.mark.slow
def test_gehan_pvalues_uniform_under_null():
    """Test that p-values from identically distributed groups are uniform."""
    rng = derive_rng(17, "null-lifetimes")
    p_values = []
    for _ in range(300):
        a = _sample(rng.exponential(5.0, 40), rng.random(40) < 0.8)
        b = _sample(rng.exponential(5.0, 40), rng.random(40) < 0.8)
        if a.n_events == 0 or b.n_events == 0:
            continue
        p_values.append(gehan_wilcoxon([a, b]).p_value)
    assert len(p_values) == 300
    assert stats.kstest(p_values, "uniform").pvalue > 0.001


# =============================================================================
# RUN TESTS
# =============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v"])

"""
Tests for the Tailfit Module.

Covers empirical CCDFs, discrete power-law fitting and sampling, KS
bootstrap p-values and the concurrent fit grid.
"""
import asyncio

import numpy as np
import pytest
from scipy import special

from src.errors import DegenerateSampleError
from src.rng import derive_rng
from src.tailfit import (
    FIT_COLUMNS,
    PowerLawFit,
    bootstrap_pvalue,
    ccdf,
    ccdf_frame,
    fit_grid,
    fit_power_law,
    fits_to_frame,
    fits_to_wide,
    ks_distance,
    mle_alpha,
    sample_discrete_power_law,
)


@pytest.fixture(scope="module")
def power_law_sample() -> np.ndarray:
    return sample_discrete_power_law(2.5, 1, 5000, derive_rng(11, "tailfit-test"))


# =============================================================================
# TESTS - CCDF
# =============================================================================

def test_ccdf_values():
    """Test P(X > x) at each distinct value."""
    assert ccdf([1, 1, 2, 3]) == [(1, 0.5), (2, 0.25), (3, 0.0)]


def test_ccdf_unsorted_input():
    """Test that input order does not matter."""
    assert ccdf([3, 1, 2, 1]) == ccdf([1, 1, 2, 3])


def test_ccdf_empty():
    """Test that an empty sample is rejected."""
    with pytest.raises(ValueError):
        ccdf([])


def test_ccdf_frame():
    """Test the tidy plotting layout."""
    frame = ccdf_frame([1, 2, 2], group="health", metric="likes")
    assert list(frame.columns) == ["group", "metric", "x", "ccdf"]
    assert frame["x"].tolist() == [1, 2]
    assert frame["ccdf"].tolist() == pytest.approx([2.0 / 3.0, 0.0])


# =============================================================================
# TESTS - SAMPLING
# =============================================================================

def test_sampler_respects_lower_bound():
    """Test that every draw is at least x_min."""
    draws = sample_discrete_power_law(2.2, 7, 2000, derive_rng(0, "lower-bound"))
    assert draws.min() >= 7
    assert draws.dtype == np.int64


def test_sampler_mass_at_lower_bound():
    """Test P(X = x_min) = 1 / zeta(alpha, x_min)."""
    draws = sample_discrete_power_law(2.5, 1, 20000, derive_rng(1, "mass"))
    expected = 1.0 / special.zeta(2.5, 1)
    assert np.mean(draws == 1) == pytest.approx(expected, abs=0.015)


def test_sampler_deterministic():
    """Test that the same stream gives the same draws."""
    a = sample_discrete_power_law(3.0, 2, 100, derive_rng(5, "same"))
    b = sample_discrete_power_law(3.0, 2, 100, derive_rng(5, "same"))
    np.testing.assert_array_equal(a, b)


def test_sampler_invalid_parameters():
    """Test alpha and x_min validation."""
    rng = derive_rng(0)
    with pytest.raises(ValueError):
        sample_discrete_power_law(1.0, 1, 10, rng)
    with pytest.raises(ValueError):
        sample_discrete_power_law(2.5, 0, 10, rng)


# =============================================================================
# TESTS - FITTING
# =============================================================================

def test_fit_fixed_lower_bound(power_law_sample):
    """Test that the exact MLE recovers alpha with x_min fixed."""
    fit = fit_power_law(power_law_sample, x_min=1)
    assert fit.x_min == 1
    assert fit.n_tail == 5000
    assert fit.alpha == pytest.approx(2.5, abs=0.1)
    assert fit.standard_error == pytest.approx((fit.alpha - 1.0) / np.sqrt(5000))


def test_fit_scans_lower_bound():
    """Test that the KS scan finds a tail above a flat body."""
    rng = derive_rng(3, "scan")
    tail = sample_discrete_power_law(2.2, 5, 3000, rng)
    body = rng.integers(1, 5, size=2000)
    fit = fit_power_law(np.concatenate([body, tail]))
    assert 4 <= fit.x_min <= 15
    assert fit.alpha == pytest.approx(2.2, abs=0.3)
    assert 0.0 <= fit.ks_statistic <= 1.0
    assert fit.n == 5000


def test_mle_maximizes_likelihood(power_law_sample):
    """Test that nearby exponents have lower likelihood than the MLE."""
    x = power_law_sample
    log_sum = float(np.log(x).sum())
    alpha = mle_alpha(1, float(x.size), log_sum)

    def loglik(a: float) -> float:
        return -x.size * np.log(special.zeta(a, 1)) - a * log_sum

    assert loglik(alpha) >= loglik(alpha + 0.01)
    assert loglik(alpha) >= loglik(alpha - 0.01)


def test_ks_distance_range():
    """Test that the KS distance lies in [0, 1]."""
    values = np.array([1, 2, 3])
    counts = np.array([100, 20, 5])
    d = ks_distance(values, counts, 2.5, 1)
    assert 0.0 <= d <= 1.0


def test_fit_degenerate_sample():
    """Test that fewer than two distinct values cannot be fitted."""
    with pytest.raises(DegenerateSampleError):
        fit_power_law([3, 3, 3])
    with pytest.raises(DegenerateSampleError):
        fit_power_law([])


def test_fit_rejects_non_positive():
    """Test that zeros and negatives are rejected."""
    with pytest.raises(ValueError):
        fit_power_law([0, 1, 2])


def test_fit_rejects_non_integers():
    """Test that fractional counts are rejected."""
    with pytest.raises(ValueError):
        fit_power_law([1.5, 2, 3])


def test_fit_fixed_lower_bound_must_be_sample_value(power_law_sample):
    """Test that a fixed x_min must be an observed value below the maximum."""
    with pytest.raises(ValueError):
        fit_power_law(power_law_sample, x_min=int(power_law_sample.max()))


def test_power_law_fit_validation():
    """Test the invariants of a fit result."""
    with pytest.raises(ValueError):
        PowerLawFit(x_min=1, alpha=1.0, n_tail=10, ks_statistic=0.1, log_likelihood=-1.0)
    with pytest.raises(ValueError):
        PowerLawFit(x_min=1, alpha=2.0, n_tail=1, ks_statistic=0.1, log_likelihood=-1.0)
    with pytest.raises(ValueError):
        PowerLawFit(x_min=1, alpha=2.0, n_tail=10, ks_statistic=1.5, log_likelihood=-1.0)


@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_fit_recovers_exponent_grid(alpha, seed):
    """Test exponent recovery within four standard errors across exponents and seeds."""
    sample = sample_discrete_power_law(alpha, 1, 5000, derive_rng(seed, f"tail-grid-{alpha}"))
    fit = fit_power_law(sample, x_min=1)
    assert abs(fit.alpha - alpha) < 4.0 * fit.standard_error + 0.02


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0])
def test_fit_scanned_lower_bound_grid(alpha):
    """Test recovery with a scanned lower bound over several seeds."""
    estimates = []
    for seed in range(5):
        sample = sample_discrete_power_law(alpha, 3, 4000, derive_rng(seed, f"tail-scan-{alpha}"))
        fit = fit_power_law(sample)
        assert fit.x_min >= 3
        estimates.append(fit.alpha)
    assert np.mean(estimates) == pytest.approx(alpha, abs=0.15)


# =============================================================================
# TESTS - BOOTSTRAP
# =============================================================================

def test_bootstrap_pvalue_range_and_determinism():
    """Test that the p-value is a seeded share in [0, 1]."""
    samples = sample_discrete_power_law(2.5, 1, 300, derive_rng(2, "boot"))
    fit = fit_power_law(samples)
    p1 = bootstrap_pvalue(samples, fit, n_bootstrap=20, seed=4)
    p2 = bootstrap_pvalue(samples, fit, n_bootstrap=20, seed=4)
    assert 0.0 <= p1 <= 1.0
    assert p1 == p2
    assert (p1 * 20) == pytest.approx(round(p1 * 20))


# =============================================================================
# TESTS - FIT GRID
# =============================================================================

def test_fit_grid_keeps_order_and_skips_bad_cells(power_law_sample):
    """Test concurrent fits with an unusable cell reported, not raised."""
    samples = {
        ("health", "likes"): power_law_sample.tolist(),
        ("health", "shares"): [0, 0, 5, 5],
        ("diet", "likes"): power_law_sample[:2000].tolist(),
    }
    fits = asyncio.run(fit_grid(samples))
    assert [(f.group, f.metric) for f in fits] == list(samples)
    assert fits[0].fit is not None
    assert fits[1].fit is None and "degenerate" in fits[1].note
    assert fits[2].fit is not None


def test_fits_frames(power_law_sample):
    """Test the long and wide fit tables."""
    samples = {
        ("health", "likes"): power_law_sample.tolist(),
        ("health", "shares"): [0, 0, 5, 5],
    }
    frame = fits_to_frame(asyncio.run(fit_grid(samples)))
    assert list(frame.columns) == FIT_COLUMNS + ["note"]
    assert frame.loc[1, "n_tail"] == 0

    wide = fits_to_wide(frame, ["likes", "shares", "comments"])
    assert list(wide.columns) == [
        "group", "likes_x_min", "likes_alpha", "shares_x_min", "shares_alpha",
        "comments_x_min", "comments_alpha",
    ]
    assert wide.loc[0, "likes_alpha"] == frame.loc[0, "alpha"]
    assert np.isnan(wide.loc[0, "comments_alpha"])


# =============================================================================
# RUN TESTS
# =============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v"])

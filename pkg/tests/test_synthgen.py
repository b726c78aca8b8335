"""
Tests for the Synthgen Module.

Covers spec validation, deterministic corpus generation with an exact
ledger, and the graph, count and ordinal fixtures.
"""
import io

import numpy as np
import pytest

from src.corpus import dump_corpus, summarize
from src.errors import GeneratorSpecError
from src.lexicon import load_dictionary
from src.synthgen import (
    GeneratorSpec,
    generate_corpus,
    generate_correlated_counts,
    generate_planted_partition_graph,
    largest_remainder,
    load_ledger,
    planted_dictionary,
    simulate_pom,
)


def _small_spec(**overrides) -> GeneratorSpec:
    return GeneratorSpec(n_posts=200, n_users=300, n_topic_users=100, **overrides)


def _dump(corpus) -> str:
    sink = io.StringIO()
    dump_corpus(corpus, sink)
    return sink.getvalue()


# =============================================================================
# TESTS - SPEC
# =============================================================================

def test_default_spec_is_valid():
    """Test that the defaults pass cross-field validation."""
    spec = GeneratorSpec()
    spec.check()
    assert spec.topics == ["environment", "health", "diet", "geopolitics"]
    assert spec.window_end > spec.window_start


def test_reference_shaped_scale():
    """Test the scaled reference magnitudes."""
    spec = GeneratorSpec.reference_shaped(0.01)
    assert spec.n_posts == 2086
    assert spec.n_users == 8640
    assert spec.n_topic_users == 3000
    for scale in (0.0, 1.5):
        with pytest.raises(GeneratorSpecError):
            GeneratorSpec.reference_shaped(scale)


@pytest.mark.parametrize(
    "data, field",
    [
        ({"n_posts": 0}, "n_posts"),
        ({"bogus": 1}, "bogus"),
        ({"topics": ["environment"]}, "topics"),
        ({"pom_intercepts": [1.0, 0.0, 2.0]}, "pom_intercepts"),
        ({"labeled_fraction": 0.99, "tie_fraction": 0.02}, "labeled_fraction"),
        ({"n_users": 10, "n_topic_users": 20}, "n_topic_users"),
        ({"terms_per_post": [2, 3]}, "terms_per_post"),
    ],
)
def test_spec_errors_name_the_field(data, field):
    """Test that invalid specs report the offending field."""
    with pytest.raises(GeneratorSpecError) as excinfo:
        GeneratorSpec.load(data)
    assert excinfo.value.field == field


def test_largest_remainder():
    """Test Hamilton apportionment with ties broken by order."""
    assert largest_remainder(10, {"a": 1, "b": 1, "c": 1}, ["a", "b", "c"]) == {"a": 4, "b": 3, "c": 3}
    shares = {"environment": 18.39, "health": 12.73, "diet": 5.94, "geopolitics": 62.95}
    split = largest_remainder(100, shares, list(shares))
    assert split == {"environment": 18, "health": 13, "diet": 6, "geopolitics": 63}


def test_planted_dictionary():
    """Test planted terms per topic."""
    spec = GeneratorSpec()
    dictionary = planted_dictionary(spec)
    assert len(dictionary) == 40 + 35 + 22 + 62
    assert dictionary.label_of("env001") == "environment"
    assert dictionary.label_of("geo062") == "geopolitics"
    assert len(dictionary.terms_for("diet")) == 22


# =============================================================================
# TESTS - CORPUS GENERATION
# =============================================================================

def test_generation_is_deterministic():
    """Test that the same seed gives byte-identical corpora."""
    first, ledger_a = generate_corpus(_small_spec(), seed=3)
    second, ledger_b = generate_corpus(_small_spec(), seed=3)
    assert _dump(first) == _dump(second)
    assert ledger_a == ledger_b


def test_generation_depends_on_seed():
    """Test that different seeds give different corpora."""
    first, _ = generate_corpus(_small_spec(), seed=3)
    second, _ = generate_corpus(_small_spec(), seed=4)
    assert _dump(first) != _dump(second)


def test_ledger_counts_match_corpus(synthetic_corpus, synthetic_ledger):
    """Test that ledger tallies equal the corpus summary."""
    assert synthetic_ledger.counts == summarize(synthetic_corpus).to_dict()
    assert synthetic_ledger.counts["posts"] == 2086


def test_post_kinds(synthetic_corpus, synthetic_ledger):
    """Test planted post topics and empty messages."""
    spec = synthetic_ledger.spec
    assert sum(synthetic_ledger.post_counts.values()) == round(spec.labeled_fraction * spec.n_posts)
    empty = [p for p in synthetic_corpus.posts.values() if not p.has_message]
    assert len(empty) == round(spec.empty_message_fraction * spec.n_posts)
    labeled = [t for t in synthetic_ledger.post_topics.values() if t != "unlabeled"]
    assert len(labeled) == sum(synthetic_ledger.post_counts.values())


def test_posts_precede_their_events(synthetic_corpus):
    """Test that no like or comment predates its post."""
    for post in synthetic_corpus.posts.values():
        times = [t for _, t in post.like_events + post.comment_events]
        assert all(t >= post.created_at for t in times)


def test_polarized_users(synthetic_ledger):
    """Test that polarized users like one topic and follow the planted shares."""
    assert sum(synthetic_ledger.polarized_counts.values()) == len(synthetic_ledger.polarized_users)
    for user in synthetic_ledger.polarized_users:
        assert synthetic_ledger.topics_liked[user] == 1
    singles = sum(1 for k in synthetic_ledger.topics_liked.values() if k == 1)
    assert singles == len(synthetic_ledger.polarized_users)


def test_topics_liked_follow_likes(synthetic_corpus, synthetic_ledger):
    """Test that a user never likes more topics than they have likes."""
    for user, k in synthetic_ledger.topics_liked.items():
        assert 1 <= k <= len(synthetic_corpus.user_index[user].liked)


def test_synthetic_artifacts(synthetic_dir, synthetic_ledger):
    """Test the files written next to the corpus."""
    assert {p.name for p in synthetic_dir.iterdir()} >= {"corpus.jsonl", "dictionary.csv", "ledger.json"}
    dictionary = load_dictionary(synthetic_dir / "dictionary.csv")
    assert len(dictionary) == len(synthetic_ledger.dictionary)
    assert load_ledger(synthetic_dir / "ledger.json") == synthetic_ledger


def test_load_ledger_missing(tmp_path):
    """Test that a missing ledger is reported."""
    with pytest.raises(FileNotFoundError):
        load_ledger(tmp_path / "ledger.json")


# =============================================================================
# TESTS - FIXTURES
# =============================================================================

def test_planted_partition_graph():
    """Test complete blocks joined by an exact number of bridges."""
    graph, reference = generate_planted_partition_graph(
        [4, 3], 1.0, 0.0, weight_law=None, inter_edges=2, block_names=["x", "y"]
    )
    assert sorted(graph.nodes)[:2] == ["x_000", "x_001"]
    assert graph.number_of_edges() == 6 + 3 + 2
    assert reference.n_communities == 2
    assert reference.assignment["x_000"] != reference.assignment["y_000"]


def test_planted_partition_weights():
    """Test that inside-block weights follow the weight law."""
    graph, _ = generate_planted_partition_graph([10, 10], 0.8, 0.1, seed=2)
    inside = [d["weight"] for u, v, d in graph.edges(data=True) if u[:2] == v[:2]]
    assert min(inside) >= 5


@pytest.mark.parametrize(
    "kwargs",
    [
        {"block_sizes": [3, 3], "p_in": 0.2, "p_out": 0.2},
        {"block_sizes": [], "p_in": 0.5, "p_out": 0.1},
        {"block_sizes": [3, 3], "p_in": 0.5, "p_out": 0.1, "block_names": ["a"]},
        {"block_sizes": [2, 2], "p_in": 0.5, "p_out": 0.1, "inter_edges": 5},
    ],
)
def test_planted_partition_invalid(kwargs):
    """Test probability, size, name and bridge-count validation."""
    with pytest.raises(ValueError):
        generate_planted_partition_graph(**kwargs)


def test_correlated_counts():
    """Test Poisson margins and the planted dependence."""
    corr = np.array([[1.0, 0.6, 0.0], [0.6, 1.0, 0.0], [0.0, 0.0, 1.0]])
    counts = generate_correlated_counts(5000, corr, mean=50, seed=1)
    assert counts.shape == (5000, 3)
    np.testing.assert_allclose(counts.mean(axis=0), 50, atol=1.0)
    observed = np.corrcoef(counts.T)
    assert observed[0, 1] == pytest.approx(0.6, abs=0.05)
    assert abs(observed[0, 2]) < 0.05


def test_correlated_counts_invalid():
    """Test that the correlation must be a symmetric unit-diagonal matrix."""
    with pytest.raises(ValueError):
        generate_correlated_counts(10, np.array([[1.0, 0.5], [0.2, 1.0]]))
    with pytest.raises(ValueError):
        generate_correlated_counts(10, np.array([[2.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        generate_correlated_counts(10, np.eye(2), mean=0)


def test_simulate_pom():
    """Test response range and determinism."""
    x = np.arange(1, 101, dtype=float)
    y = simulate_pom(x, [-0.7602, 1.0783, 2.9648], 0.1141, seed=4)
    assert y.min() >= 1 and y.max() <= 4
    np.testing.assert_array_equal(y, simulate_pom(x, [-0.7602, 1.0783, 2.9648], 0.1141, seed=4))
    with pytest.raises(ValueError):
        simulate_pom(x, [1.0, 0.0], 0.1)


# =============================================================================
# RUN TESTS
# =============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v"])

"""
Tests for the Netcore Module.

Covers the co-occurrence projection and the disparity-filter backbone.
"""
import networkx as nx
import numpy as np
import pandas as pd
import pytest

from src.lexicon import build_dtm
from src.netcore import (
    TermNetwork,
    backbone_sweep,
    directional_scores,
    disparity_pvalue_integral,
    disparity_scores,
    extract_backbone,
    project_cooccurrence,
)
from src.rng import derive_rng
from src.synthgen import generate_planted_partition_graph


@pytest.fixture
def star_network() -> TermNetwork:
    """Hub 'a' with one heavy spoke and three light ones."""
    frame = pd.DataFrame({
        "term_i": ["a", "a", "a", "a"],
        "term_j": ["b", "c", "d", "e"],
        "weight": [10, 1, 1, 1],
    })
    return TermNetwork.from_frame(frame)


@pytest.fixture(scope="module")
def planted_network() -> TermNetwork:
    """Three planted blocks with power-law weights inside blocks."""
    graph, _ = generate_planted_partition_graph([30, 25, 20], 0.4, 0.05, seed=4)
    frame = nx.to_pandas_edgelist(graph, source="term_i", target="term_j")
    return TermNetwork.from_frame(frame, nodes=tuple(sorted(graph.nodes)))


# =============================================================================
# TESTS - CO-OCCURRENCE
# =============================================================================

def test_cooccurrence_sample(sample_dtm):
    """Test pair counts by presence on the sample corpus."""
    net = project_cooccurrence(sample_dtm)
    assert net.n_nodes == 9
    assert net.n_edges == 16
    weights = {(i, j): w for i, j, w in net.edge_list()}
    assert weights[("climate", "pollution")] == 2
    assert weights[("cancer", "vaccine")] == 2
    assert weights[("detox", "sugar")] == 2
    assert weights[("nato", "war")] == 1
    assert net.total_weight == 19


def test_cooccurrence_ignores_repetitions(sample_dtm):
    """Test that repeated terms in one post add 1 to a pair, not the product."""
    net = project_cooccurrence(sample_dtm)
    weights = {(i, j): w for i, j, w in net.edge_list()}
    # p4 repeats both terms twice and is their only shared post
    assert weights[("new world order", "war")] == 1


def test_cooccurrence_edges_canonical(sample_dtm):
    """Test src < dst storage with no self-loops."""
    net = project_cooccurrence(sample_dtm)
    assert np.all(net.src < net.dst)
    assert np.all(net.weight > 0)


def test_cooccurrence_single_column(sample_corpus):
    """Test that a one-term matrix gives one node and no edges."""
    dtm = build_dtm(sample_corpus, min_occurrences=5)
    assert dtm.cols == ("cancer",)
    net = project_cooccurrence(dtm)
    assert net.n_nodes == 1
    assert net.n_edges == 0


def test_cooccurrence_no_columns(sample_corpus):
    """Test that a matrix without columns cannot be projected."""
    dtm = build_dtm(sample_corpus, min_occurrences=100, on_empty="empty")
    with pytest.raises(ValueError):
        project_cooccurrence(dtm)


def test_network_validation():
    """Test that malformed edge arrays are rejected."""
    with pytest.raises(ValueError):
        TermNetwork(("a", "b"), np.array([1]), np.array([0]), np.array([1]))
    with pytest.raises(ValueError):
        TermNetwork(("a", "b"), np.array([0]), np.array([1]), np.array([0]))


def test_network_to_networkx_labels(sample_dtm, sample_dictionary):
    """Test that dictionary labels travel to the networkx view."""
    net = project_cooccurrence(sample_dtm).with_labels(sample_dictionary)
    graph = net.to_networkx()
    assert graph.number_of_nodes() == 9
    assert graph.number_of_edges() == 16
    assert graph.nodes["climate"]["label"] == "environment"
    assert graph["climate"]["pollution"]["weight"] == 2


def test_network_from_frame_keeps_isolated_nodes():
    """Test that explicit nodes survive an edge-list rebuild."""
    frame = pd.DataFrame({"term_i": ["b"], "term_j": ["a"], "weight": [3]})
    net = TermNetwork.from_frame(frame, nodes=("a", "b", "z"))
    assert net.nodes == ("a", "b", "z")
    assert net.edge_list() == [("a", "b", 3)]


# =============================================================================
# TESTS - DISPARITY FILTER
# =============================================================================

def test_directional_scores_star(star_network):
    """Test closed-form scores on a hub with one dominant spoke."""
    from_src, from_dst = directional_scores(star_network)
    assert from_src[0] == pytest.approx((3.0 / 13.0) ** 3)
    assert from_src[1] == pytest.approx((12.0 / 13.0) ** 3)
    # spokes have degree 1 and are never significant from their side
    np.testing.assert_array_equal(from_dst, np.ones(4))


def test_closed_form_matches_integral(star_network):
    """Test that the closed form equals the significance integral."""
    scores = disparity_scores(star_network)
    degree = star_network.node_degrees[0]
    strength = star_network.node_strengths[0]
    for spoke, w in zip("bcde", (10, 1, 1, 1)):
        expected = disparity_pvalue_integral(w / strength, int(degree))
        assert scores[("a", spoke)] == pytest.approx(expected, abs=1e-10)
        assert scores[(spoke, "a")] == 1.0


def test_pvalue_integral_degree_one():
    """Test that a degree-one endpoint scores 1."""
    assert disparity_pvalue_integral(0.5, 1) == 1.0


def test_backbone_either_and_both(star_network):
    """Test the either/both retention rules."""
    either = extract_backbone(star_network, alpha=0.05, mode="either")
    assert either.n_retained == 1
    assert either.retained_edges == [("a", "b", 10)]
    both = extract_backbone(star_network, alpha=0.05, mode="both")
    assert both.n_retained == 0


def test_backbone_network_keeps_nodes(star_network):
    """Test that the backbone graph has the full node set."""
    backbone = extract_backbone(star_network, alpha=0.05)
    net = backbone.network()
    assert net.nodes == star_network.nodes
    assert net.n_edges == 1


def test_backbone_frame(star_network):
    """Test the edge table with minimum scores and retention flags."""
    frame = extract_backbone(star_network, alpha=0.05).to_frame()
    assert list(frame.columns) == ["term_i", "term_j", "weight", "alpha_min", "retained"]
    assert frame["retained"].tolist() == [True, False, False, False]
    assert frame["alpha_min"].iloc[0] == pytest.approx(27.0 / 2197.0)


def test_backbone_monotone_in_alpha(sample_dtm):
    """Test that raising alpha never removes edges."""
    net = project_cooccurrence(sample_dtm)
    previous = None
    for alpha in (0.01, 0.05, 0.2, 0.5, 0.9):
        kept = extract_backbone(net, alpha).retained
        if previous is not None:
            assert np.all(kept[previous])
        previous = kept


def test_backbone_invalid_arguments(star_network):
    """Test alpha range and mode validation."""
    with pytest.raises(ValueError):
        extract_backbone(star_network, alpha=0.0)
    with pytest.raises(ValueError):
        extract_backbone(star_network, alpha=1.0)
    with pytest.raises(ValueError):
        extract_backbone(star_network, mode="neither")


def test_backbone_without_edges():
    """Test that an edgeless network yields an empty backbone."""
    net = TermNetwork(("a",), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
    backbone = extract_backbone(net, alpha=0.05)
    assert backbone.n_retained == 0


def test_backbone_sweep(star_network):
    """Test retained edges and connected nodes over several levels."""
    sweep = backbone_sweep(star_network, [0.5, 0.01, 0.05, 0.9])
    assert sweep["alpha"].tolist() == [0.01, 0.05, 0.5, 0.9]
    assert sweep["edges"].tolist() == [0, 1, 1, 4]
    assert sweep["connected_nodes"].tolist() == [0, 2, 2, 5]


def test_closed_form_matches_integral_on_planted_network(planted_network):
    """Test the closed form against quadrature at every endpoint of a heavy-tailed network."""
    from_src, from_dst = directional_scores(planted_network)
    strength = planted_network.node_strengths
    degree = planted_network.node_degrees
    w = planted_network.weight.astype(float)
    for scores, ends in ((from_src, planted_network.src), (from_dst, planted_network.dst)):
        expected = [disparity_pvalue_integral(w[e] / strength[v], int(degree[v])) for e, v in enumerate(ends)]
        np.testing.assert_allclose(scores, expected, rtol=1e-8, atol=1e-10)


def test_closed_form_matches_integral_random_arguments():
    """Test the closed form against quadrature over random shares and degrees."""
    rng = derive_rng(21, "disparity-quadrature")
    shares = rng.uniform(0.0, 1.0, size=300)
    degrees = rng.integers(2, 200, size=300)
    for p, k in zip(shares, degrees):
        assert (1.0 - p) ** (k - 1) == pytest.approx(disparity_pvalue_integral(float(p), int(k)), abs=1e-10)


@pytest.mark.parametrize("mode", ["either", "both"])
def test_backbone_nested_across_alpha(planted_network, mode):
    """Test that each backbone contains the backbones at every smaller alpha."""
    levels = (0.01, 0.05, 0.1, 0.5)
    kept = [extract_backbone(planted_network, alpha, mode=mode).retained for alpha in levels]
    for smaller, larger in zip(kept, kept[1:]):
        assert np.all(larger[smaller])
    assert kept[-1].sum() > kept[0].sum()


# =============================================================================
# RUN TESTS
# =============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v"])

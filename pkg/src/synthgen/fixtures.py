"""
Statistical fixtures with planted parameters: block-model graphs, correlated
topic counts and ordinal responses.
"""

from typing import Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import stats
from scipy.special import expit

from ..community.graph import as_weighted_graph
from ..community.partition import Partition, reference_partition
from ..rng import derive_rng
from ..tailfit.powerlaw import sample_discrete_power_law
from .spec import PowerLawParams

DEFAULT_WEIGHT_LAW = PowerLawParams(alpha=2.5, x_min=5)


def generate_planted_partition_graph(
    block_sizes: Sequence[int],
    p_in: float,
    p_out: float,
    weight_law: Optional[PowerLawParams] = DEFAULT_WEIGHT_LAW,
    seed: int = 0,
    inter_edges: Optional[int] = None,
    block_names: Optional[Sequence[str]] = None,
) -> Tuple[nx.Graph, Partition]:
    """
    Planted-partition graph and its reference partition.

    Pairs inside a block are linked with probability ``p_in`` and weight drawn
    from ``weight_law`` (weight 1 when None); pairs across blocks are linked
    with probability ``p_out`` and weight 1. With ``inter_edges`` set, exactly
    that many cross-block pairs are linked instead.

    Nodes are named ``<block>_<index>``.
    """
    if not block_sizes or any(s < 1 for s in block_sizes):
        raise ValueError("block sizes must be positive")
    if not 0.0 <= p_out < p_in <= 1.0:
        raise ValueError(f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")
    names = list(block_names) if block_names is not None else [f"b{k}" for k in range(len(block_sizes))]
    if len(names) != len(block_sizes):
        raise ValueError("block_names must match block_sizes")

    rng = derive_rng(seed, "planted-partition")
    nodes = [f"{names[b]}_{i:03d}" for b, size in enumerate(block_sizes) for i in range(size)]
    block_of = np.repeat(np.arange(len(block_sizes)), block_sizes)
    graph = nx.Graph()
    graph.add_nodes_from(nodes)

    iu, ju = np.triu_indices(len(nodes), k=1)
    same = block_of[iu] == block_of[ju]
    inside = rng.random(iu.size) < p_in
    for i, j in zip(iu[same & inside], ju[same & inside]):
        if weight_law is None:
            w = 1
        else:
            w = int(sample_discrete_power_law(weight_law.alpha, weight_law.x_min, 1, rng)[0])
        graph.add_edge(nodes[i], nodes[j], weight=float(w))

    across = np.nonzero(~same)[0]
    if inter_edges is not None:
        if not 0 <= inter_edges <= across.size:
            raise ValueError(f"inter_edges must be in [0, {across.size}], got {inter_edges}")
        chosen = rng.choice(across, size=inter_edges, replace=False)
    else:
        chosen = across[rng.random(across.size) < p_out]
    for k in sorted(chosen.tolist()):
        graph.add_edge(nodes[iu[k]], nodes[ju[k]], weight=1.0)

    labels = {node: names[b] for node, b in zip(nodes, block_of)}
    return graph, reference_partition(as_weighted_graph(graph), labels)


def generate_correlated_counts(
    n: int,
    correlation: np.ndarray,
    mean: float = 50.0,
    seed: int = 0,
) -> np.ndarray:
    """
    Poisson counts with a Gaussian-copula dependence, shape (n, d).

    The copula correlation is ``correlation``; the Pearson correlation of the
    counts is close to it for large means.
    """
    corr = np.asarray(correlation, dtype=float)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
        raise ValueError("correlation must be a square matrix")
    if not np.allclose(corr, corr.T) or np.any(np.abs(np.diag(corr) - 1.0) > 1e-12):
        raise ValueError("correlation must be symmetric with unit diagonal")
    if mean <= 0:
        raise ValueError(f"mean must be > 0, got {mean}")
    rng = derive_rng(seed, "correlated-counts")
    z = rng.multivariate_normal(np.zeros(corr.shape[0]), corr, size=n, method="eigh")
    u = np.clip(stats.norm.cdf(z), 1e-12, 1.0 - 1e-12)
    return stats.poisson.ppf(u, mean).astype(np.int64)


def simulate_pom(
    x: Sequence[float],
    intercepts: Sequence[float],
    beta: float,
    seed: int = 0,
) -> np.ndarray:
    """Ordinal responses 1..K from logit P(Y <= j) = alpha_j - beta * x."""
    alphas = np.asarray(intercepts, dtype=float)
    if np.any(np.diff(alphas) <= 0):
        raise ValueError("intercepts must be strictly increasing")
    x = np.asarray(x, dtype=float)
    cumulative = expit(alphas[None, :] - beta * x[:, None])
    u = derive_rng(seed, "pom-responses").random(x.size)
    return 1 + (u[:, None] > cumulative).sum(axis=1)

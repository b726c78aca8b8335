"""
Shared driver for agglomerative (dendrogram-producing) methods.

Each connected component is agglomerated on its own. Merge gains are
measured against the global edge weight, so the modularity of the combined
result is the sum of the component contributions and the best cut can be
chosen per component.
"""

from typing import Callable, Dict, List, Tuple

import numpy as np
from loguru import logger

from ..errors import EmptyGraphError
from .graph import GraphLike, WeightedGraph, as_weighted_graph
from .partition import Dendrogram, Merge, Partition

# merge_fn(graph, component, m, strengths, adjacency, allocate_id) -> merges
MergeFn = Callable[[WeightedGraph, List[int], float, np.ndarray, List[Dict[int, float]], Callable[[], int]], List[Merge]]


def run_agglomerative(graph: GraphLike, merge_fn: MergeFn, algorithm: str) -> Partition:
    wg = as_weighted_graph(graph)
    if wg.n == 0:
        raise EmptyGraphError()

    m = wg.total_weight
    strengths = wg.strengths()
    initial_q = float(-np.sum((strengths / (2.0 * m)) ** 2)) if m > 0 else 0.0
    dendrogram = Dendrogram(n_leaves=wg.n, initial_modularity=initial_q)
    if m <= 0:
        return Partition.from_labels(wg, np.arange(wg.n), algorithm, dendrogram)

    adjacency = wg.adjacency()
    counter = [wg.n]

    def allocate_id() -> int:
        counter[0] += 1
        return counter[0] - 1

    best_steps: List[Tuple[int, int]] = []  # (offset into dendrogram.merges, merges kept)
    for component in wg.components():
        if len(component) < 2:
            continue
        merges = merge_fn(wg, component, m, strengths, adjacency, allocate_id)
        gains = np.concatenate([[0.0], np.cumsum([mg.delta_q for mg in merges])])
        best = int(np.argmax(gains))
        best_steps.append((len(dendrogram.merges), best))
        dendrogram.merges.extend(merges)

    members: Dict[int, List[int]] = {i: [i] for i in range(wg.n)}
    for offset, kept in best_steps:
        for step in dendrogram.merges[offset:offset + kept]:
            members[step.merged] = members.pop(step.left) + members.pop(step.right)
    labels = np.empty(wg.n, dtype=np.int64)
    for cid, leaves in members.items():
        labels[leaves] = cid

    partition = Partition.from_labels(wg, labels, algorithm, dendrogram)
    logger.info(
        "{}: {} communities, modularity {:.4f} ({} merges)",
        algorithm, partition.n_communities, partition.modularity, len(dendrogram.merges),
    )
    return partition


def merge_gain(w_ab: float, tot_a: float, tot_b: float, m: float) -> float:
    """Modularity change when communities a and b are joined."""
    return w_ab / m - tot_a * tot_b / (2.0 * m * m)

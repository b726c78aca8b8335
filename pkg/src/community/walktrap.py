"""
Walktrap - Random-Walk Agglomerative Community Detection

Vertices are compared through the distribution of a length-t random walk
started from them. Communities are merged greedily (adjacent pairs only)
in order of the smallest increase of the mean squared walk distance

    delta_sigma(C1, C2) = (1/n) * |C1||C2| / (|C1| + |C2|) * || D^-1/2 (P^t_C1 - P^t_C2) ||^2

and the dendrogram is cut where modularity peaks.

Key techniques:
- Self-loop on every vertex (weight = mean incident weight) before building P
- Lazy-deletion heap keyed by (delta_sigma, lower id, higher id)
- Community walk vectors merged as size-weighted averages
"""

import heapq
from typing import Callable, Dict, List

import numpy as np
from loguru import logger

from .agglomerative import merge_gain, run_agglomerative
from .graph import GraphLike, WeightedGraph
from .partition import Merge, Partition

DEFAULT_WALK_LENGTH = 4


def _walk_vectors(component: List[int], adjacency: List[Dict[int, float]], walk_length: int) -> np.ndarray:
    """Rows are D^-1/2-scaled t-step transition probabilities for each vertex."""
    local = {v: k for k, v in enumerate(component)}
    size = len(component)
    a = np.zeros((size, size), dtype=float)
    for v in component:
        i = local[v]
        for u, w in adjacency[v].items():
            a[i, local[u]] = w
        degree = len(adjacency[v])
        a[i, i] = (sum(adjacency[v].values()) / degree) if degree else 1.0
    d = a.sum(axis=1)
    p = a / d[:, None]
    p_t = np.linalg.matrix_power(p, walk_length)
    return p_t / np.sqrt(d)[None, :]


def _walktrap_merges(walk_length: int):
    def merge_fn(
        graph: WeightedGraph,
        component: List[int],
        m: float,
        strengths: np.ndarray,
        adjacency: List[Dict[int, float]],
        allocate_id: Callable[[], int],
    ) -> List[Merge]:
        n = len(component)
        vectors = _walk_vectors(component, adjacency, walk_length)

        vec: Dict[int, np.ndarray] = {v: vectors[k] for k, v in enumerate(component)}
        size: Dict[int, int] = {v: 1 for v in component}
        tot: Dict[int, float] = {v: float(strengths[v]) for v in component}
        links: Dict[int, Dict[int, float]] = {v: dict(adjacency[v]) for v in component}

        def delta_sigma(c1: int, c2: int) -> float:
            diff = vec[c1] - vec[c2]
            return float(size[c1] * size[c2] / (size[c1] + size[c2]) * diff.dot(diff) / n)

        heap = []
        for c1 in component:
            for c2 in links[c1]:
                if c1 < c2:
                    heap.append((delta_sigma(c1, c2), c1, c2))
        heapq.heapify(heap)

        merges: List[Merge] = []
        while heap:
            ds, c1, c2 = heapq.heappop(heap)
            if c1 not in size or c2 not in size:
                continue
            c3 = allocate_id()
            gain = merge_gain(links[c1].get(c2, 0.0), tot[c1], tot[c2], m)
            merges.append(Merge(left=c1, right=c2, merged=c3, delta_q=gain))
            logger.debug("walktrap merge {} + {} -> {} (ds={:.3e})", c1, c2, c3, ds)

            size[c3] = size[c1] + size[c2]
            vec[c3] = (size[c1] * vec[c1] + size[c2] * vec[c2]) / size[c3]
            tot[c3] = tot[c1] + tot[c2]
            merged_links: Dict[int, float] = {}
            for old in (c1, c2):
                for c, w in links[old].items():
                    if c in (c1, c2):
                        continue
                    merged_links[c] = merged_links.get(c, 0.0) + w
                    del links[c][old]
            for c, w in merged_links.items():
                links[c][c3] = w
            links[c3] = merged_links
            for old in (c1, c2):
                del size[old], vec[old], tot[old], links[old]

            for c in sorted(merged_links):
                heapq.heappush(heap, (delta_sigma(c, c3), c, c3))
        return merges

    return merge_fn


def walktrap(graph: GraphLike, walk_length: int = DEFAULT_WALK_LENGTH) -> Partition:
    """
    Walktrap communities with the full dendrogram attached.

    Args:
        graph: Weighted undirected graph
        walk_length: Random walk length t (>= 1)

    Returns:
        Partition at the modularity-maximizing cut
    """
    if walk_length < 1:
        raise ValueError(f"walk_length must be >= 1, got {walk_length}")
    return run_agglomerative(graph, _walktrap_merges(walk_length), "walktrap")

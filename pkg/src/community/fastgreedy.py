"""
Fast greedy hierarchical agglomeration (Clauset-Newman-Moore).

Starting from singletons, repeatedly join the pair of adjacent communities
with the largest modularity gain dQ = 2 (e_ij - a_i a_j), where e_ij is the
fraction of edge ends between i and j and a_i the fraction attached to i.
Merging continues past the peak so the dendrogram is complete; the returned
partition is its best cut.
"""

import heapq
from typing import Callable, Dict, List

import numpy as np

from .agglomerative import merge_gain, run_agglomerative
from .graph import GraphLike, WeightedGraph
from .partition import Merge, Partition


def _fastgreedy_merges(
    graph: WeightedGraph,
    component: List[int],
    m: float,
    strengths: np.ndarray,
    adjacency: List[Dict[int, float]],
    allocate_id: Callable[[], int],
) -> List[Merge]:
    tot: Dict[int, float] = {v: float(strengths[v]) for v in component}
    links: Dict[int, Dict[int, float]] = {v: dict(adjacency[v]) for v in component}
    current: Dict[tuple, float] = {}

    # max-heap via negated gain; ties resolve to the lowest (i, j)
    heap = []
    for i in component:
        for j, w in links[i].items():
            if i < j:
                dq = merge_gain(w, tot[i], tot[j], m)
                current[(i, j)] = dq
                heap.append((-dq, i, j))
    heapq.heapify(heap)

    merges: List[Merge] = []
    while heap:
        neg_dq, i, j = heapq.heappop(heap)
        if current.get((i, j)) != -neg_dq or i not in tot or j not in tot:
            continue
        k = allocate_id()
        merges.append(Merge(left=i, right=j, merged=k, delta_q=-neg_dq))

        tot[k] = tot[i] + tot[j]
        merged_links: Dict[int, float] = {}
        for old in (i, j):
            for c, w in links[old].items():
                if c in (i, j):
                    continue
                merged_links[c] = merged_links.get(c, 0.0) + w
                del links[c][old]
                current.pop((min(c, old), max(c, old)), None)
        current.pop((i, j), None)
        for c, w in merged_links.items():
            links[c][k] = w
        links[k] = merged_links
        for old in (i, j):
            del tot[old], links[old]

        for c in sorted(merged_links):
            dq = merge_gain(merged_links[c], tot[c], tot[k], m)
            current[(c, k)] = dq
            heapq.heappush(heap, (-dq, c, k))
    return merges


def fastgreedy(graph: GraphLike) -> Partition:
    """Greedy modularity agglomeration; Partition at the best cut."""
    return run_agglomerative(graph, _fastgreedy_merges, "fastgreedy")

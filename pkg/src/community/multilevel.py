"""
Multilevel (Louvain) Modularity Optimization

Each level runs local moving: visit nodes in index order and move a node to
the neighboring community with the largest strictly positive modularity gain
over staying put (ties -> lowest community id). When a sweep makes no move
the level is done; communities are then collapsed into super-nodes (internal
weight kept as self-loops) and the next level starts. The run stops when a
level makes no move.
"""

from typing import Dict, List, Tuple

import numpy as np
from loguru import logger

from ..errors import EmptyGraphError
from .graph import GraphLike, as_weighted_graph
from .partition import Partition

# gains closer than this are treated as equal
GAIN_TOLERANCE = 1e-12
MAX_LEVELS = 64


def _local_moving(
    adj: List[Dict[int, float]], strength: np.ndarray, m: float
) -> Tuple[List[int], int]:
    n = len(adj)
    comm = list(range(n))
    tot = strength.astype(float).copy()
    moves = 0
    improved = True
    while improved:
        improved = False
        for i in range(n):
            ci = comm[i]
            k_i = strength[i]
            neighbor_weight: Dict[int, float] = {}
            for j, w in adj[i].items():
                neighbor_weight[comm[j]] = neighbor_weight.get(comm[j], 0.0) + w

            tot[ci] -= k_i
            scale = k_i / (2.0 * m)
            best_c = ci
            best_gain = neighbor_weight.get(ci, 0.0) - tot[ci] * scale
            for c in sorted(neighbor_weight):
                if c == ci:
                    continue
                gain = neighbor_weight[c] - tot[c] * scale
                if gain > best_gain + GAIN_TOLERANCE:
                    best_c, best_gain = c, gain
            tot[best_c] += k_i
            if best_c != ci:
                comm[i] = best_c
                moves += 1
                improved = True
    return comm, moves


def _aggregate(
    adj: List[Dict[int, float]], loops: np.ndarray, labels: np.ndarray
) -> Tuple[List[Dict[int, float]], np.ndarray]:
    n_comm = int(labels.max()) + 1
    new_adj: List[Dict[int, float]] = [dict() for _ in range(n_comm)]
    new_loops = np.zeros(n_comm, dtype=float)
    np.add.at(new_loops, labels, loops)
    for i, neighbors in enumerate(adj):
        ci = labels[i]
        for j, w in neighbors.items():
            if j <= i:
                continue
            cj = labels[j]
            if ci == cj:
                new_loops[ci] += w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
                new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + w
    return new_adj, new_loops


def multilevel(graph: GraphLike) -> Partition:
    """
    Louvain communities.

    Returns:
        Partition from the last level; singletons when the graph has no edges
    """
    wg = as_weighted_graph(graph)
    if wg.n == 0:
        raise EmptyGraphError()
    m = wg.total_weight
    if m <= 0:
        return Partition.from_labels(wg, np.arange(wg.n), "multilevel")

    adj = wg.adjacency()
    loops = np.zeros(wg.n, dtype=float)
    membership = np.arange(wg.n)

    for level in range(MAX_LEVELS):
        strength = np.array([sum(nb.values()) for nb in adj]) + 2.0 * loops
        comm, moves = _local_moving(adj, strength, m)
        logger.debug("multilevel level {}: {} moves", level, moves)
        if moves == 0:
            break
        # renumber by first appearance so lower super-node ids stay lower
        order: Dict[int, int] = {}
        for c in comm:
            order.setdefault(c, len(order))
        labels = np.array([order[c] for c in comm], dtype=np.int64)
        membership = labels[membership]
        adj, loops = _aggregate(adj, loops, labels)

    partition = Partition.from_labels(wg, membership, "multilevel")
    logger.info(
        "multilevel: {} communities, modularity {:.4f}",
        partition.n_communities, partition.modularity,
    )
    return partition

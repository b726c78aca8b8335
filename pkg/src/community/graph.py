"""
Weighted graph view shared by the community algorithms, plus weighted
modularity.

Nodes are indexed in sorted order of their string form so that every
tie-break ("lowest id wins") is reproducible regardless of how the input
graph was built.
"""

from dataclasses import dataclass
from typing import Dict, Hashable, List, Mapping, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from ..netcore.disparity import Backbone
from ..netcore.network import TermNetwork


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted simple graph over indexed nodes (src < dst)."""
    nodes: Tuple[Hashable, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def strengths(self) -> np.ndarray:
        s = np.zeros(self.n, dtype=float)
        np.add.at(s, self.src, self.weight)
        np.add.at(s, self.dst, self.weight)
        return s

    def adjacency(self) -> List[Dict[int, float]]:
        adj: List[Dict[int, float]] = [dict() for _ in range(self.n)]
        for i, j, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            adj[i][j] = adj[i].get(j, 0.0) + w
            adj[j][i] = adj[j].get(i, 0.0) + w
        return adj

    def components(self) -> List[List[int]]:
        """Connected components as sorted index lists, ordered by smallest index."""
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in zip(self.src.tolist(), self.dst.tolist()):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        groups: Dict[int, List[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda members: members[0])

    def index(self) -> Dict[Hashable, int]:
        return {node: i for i, node in enumerate(self.nodes)}


GraphLike = Union[WeightedGraph, TermNetwork, Backbone, nx.Graph]


def as_weighted_graph(graph: GraphLike) -> WeightedGraph:
    """Normalize any supported graph container into a WeightedGraph."""
    if isinstance(graph, WeightedGraph):
        return graph
    if isinstance(graph, Backbone):
        graph = graph.network()
    if isinstance(graph, TermNetwork):
        names = list(graph.nodes)
        triples = [(names[i], names[j], float(w)) for i, j, w in zip(graph.src, graph.dst, graph.weight)]
    elif isinstance(graph, nx.Graph):
        if graph.is_directed() or graph.is_multigraph():
            raise ValueError("community detection expects a simple undirected graph")
        names = list(graph.nodes)
        triples = []
        loops = 0
        for u, v, data in graph.edges(data=True):
            if u == v:
                loops += 1
                continue
            triples.append((u, v, float(data.get("weight", 1.0))))
        if loops:
            logger.warning("Ignoring {} self-loops in community input graph", loops)
    else:
        raise TypeError(f"unsupported graph type {type(graph).__name__}")

    ordered = tuple(sorted(names, key=str))
    index = {node: k for k, node in enumerate(ordered)}
    if triples:
        a = np.array([index[u] for u, _, _ in triples], dtype=np.int64)
        b = np.array([index[v] for _, v, _ in triples], dtype=np.int64)
        w = np.array([t[2] for t in triples], dtype=float)
    else:
        a = b = np.zeros(0, dtype=np.int64)
        w = np.zeros(0, dtype=float)
    src, dst = np.minimum(a, b), np.maximum(a, b)
    if np.any(w <= 0):
        raise ValueError("edge weights must be positive")
    order = np.lexsort((dst, src))
    return WeightedGraph(ordered, src[order], dst[order], w[order])


def modularity_from_labels(graph: WeightedGraph, labels: Sequence[int]) -> float:
    """
    Weighted modularity Q = sum_c [ in_c / m - (tot_c / 2m)^2 ].

    A graph without edges has modularity 0.
    """
    m = graph.total_weight
    if m <= 0:
        return 0.0
    labels = np.asarray(labels)
    _, comm = np.unique(labels, return_inverse=True)
    n_comm = int(comm.max()) + 1 if len(comm) else 0
    internal = np.zeros(n_comm)
    same = comm[graph.src] == comm[graph.dst]
    np.add.at(internal, comm[graph.src][same], graph.weight[same])
    tot = np.zeros(n_comm)
    np.add.at(tot, comm, graph.strengths())
    return float(np.sum(internal / m - (tot / (2.0 * m)) ** 2))


def modularity(graph: GraphLike, assignment: Mapping[Hashable, int]) -> float:
    """Weighted modularity of a node -> community mapping."""
    wg = as_weighted_graph(graph)
    missing = [v for v in wg.nodes if v not in assignment]
    if missing:
        raise ValueError(f"assignment misses {len(missing)} nodes, e.g. {missing[0]!r}")
    return modularity_from_labels(wg, [assignment[v] for v in wg.nodes])

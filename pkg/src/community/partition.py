"""
Partitions, dendrograms and concordance against a reference labeling.
"""

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from ..errors import NodeSetMismatchError
from .graph import GraphLike, WeightedGraph, as_weighted_graph, modularity_from_labels

ALGORITHMS = ("walktrap", "multilevel", "fastgreedy")
UNLABELED_NODE = "unlabeled"


@dataclass(frozen=True)
class Merge:
    """One agglomeration step: ``left`` and ``right`` become ``merged``."""
    left: int
    right: int
    merged: int
    delta_q: float


@dataclass
class Dendrogram:
    """
    Merge sequence over ``n_leaves`` singletons (ids 0..n-1); merged
    communities get ids n, n+1, ... in merge order.
    """
    n_leaves: int
    merges: List[Merge] = field(default_factory=list)
    initial_modularity: float = 0.0

    @property
    def modularities(self) -> np.ndarray:
        """Modularity after 0, 1, ..., len(merges) merges."""
        deltas = np.array([m.delta_q for m in self.merges], dtype=float)
        return self.initial_modularity + np.concatenate([[0.0], np.cumsum(deltas)])

    def cut(self, n_merges: int) -> np.ndarray:
        """Leaf labels after applying the first ``n_merges`` merges."""
        if not 0 <= n_merges <= len(self.merges):
            raise ValueError(f"n_merges must be in [0, {len(self.merges)}], got {n_merges}")
        members: Dict[int, List[int]] = {i: [i] for i in range(self.n_leaves)}
        for step in self.merges[:n_merges]:
            members[step.merged] = members.pop(step.left) + members.pop(step.right)
        labels = np.empty(self.n_leaves, dtype=np.int64)
        for cid, leaves in members.items():
            labels[leaves] = cid
        return canonical_labels(labels)


def canonical_labels(labels: Sequence[int]) -> np.ndarray:
    """Renumber communities 0..c-1 by first appearance in node order."""
    mapping: Dict[int, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to one community, with its modularity."""
    assignment: Dict[Hashable, int]
    modularity: float
    algorithm: str
    dendrogram: Optional[Dendrogram] = None

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> Dict[int, List[Hashable]]:
        groups: Dict[int, List[Hashable]] = {}
        for node, cid in self.assignment.items():
            groups.setdefault(cid, []).append(node)
        return groups

    def verify(self, graph: GraphLike, tol: float = 1e-12) -> bool:
        """Recompute modularity from the graph and compare."""
        wg = as_weighted_graph(graph)
        q = modularity_from_labels(wg, [self.assignment[v] for v in wg.nodes])
        return abs(q - self.modularity) <= tol

    def to_frame(self, reference: Optional["Partition"] = None,
                 reference_labels: Optional[Mapping[Hashable, str]] = None) -> pd.DataFrame:
        frame = pd.DataFrame({
            "term": [str(v) for v in self.assignment],
            "community_id": list(self.assignment.values()),
        })
        if reference_labels is not None:
            frame["reference_label"] = [reference_labels.get(v, UNLABELED_NODE) for v in self.assignment]
        elif reference is not None:
            frame["reference_label"] = [reference.assignment[v] for v in self.assignment]
        return frame

    @classmethod
    def from_labels(cls, graph: WeightedGraph, labels: Sequence[int], algorithm: str,
                    dendrogram: Optional[Dendrogram] = None) -> "Partition":
        labels = canonical_labels(labels)
        return cls(
            assignment={node: int(lab) for node, lab in zip(graph.nodes, labels)},
            modularity=modularity_from_labels(graph, labels),
            algorithm=algorithm,
            dendrogram=dendrogram,
        )


def reference_partition(graph: GraphLike, labels: Mapping[Hashable, str]) -> Partition:
    """
    Partition induced by node labels (e.g. dictionary topics).

    Nodes without a label share one extra community.
    """
    wg = as_weighted_graph(graph)
    names = sorted({labels.get(v, UNLABELED_NODE) for v in wg.nodes})
    code = {name: k for k, name in enumerate(names)}
    raw = [code[labels.get(v, UNLABELED_NODE)] for v in wg.nodes]
    return Partition.from_labels(wg, raw, algorithm="reference")


def concordance(partition: Partition, reference: Partition) -> float:
    """
    Node accuracy under the optimal one-to-one matching of detected
    communities to reference communities.

    Raises:
        NodeSetMismatchError: the partitions cover different nodes
    """
    if set(partition.assignment) != set(reference.assignment):
        raise NodeSetMismatchError("partitions cover different node sets")
    nodes = list(reference.assignment)
    if not nodes:
        return 1.0

    detected = [partition.assignment[v] for v in nodes]
    truth = [reference.assignment[v] for v in nodes]
    d_ids = {c: k for k, c in enumerate(sorted(set(detected)))}
    r_ids = {c: k for k, c in enumerate(sorted(set(truth)))}
    confusion = np.zeros((len(d_ids), len(r_ids)), dtype=np.int64)
    for d, r in zip(detected, truth):
        confusion[d_ids[d], r_ids[r]] += 1

    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum()) / len(nodes)

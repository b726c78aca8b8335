"""
Bipartite Projection - Term Co-occurrence Network

Builds the binary term x post incidence matrix M from a document-term matrix
and projects it onto terms with C = M Mᵀ. Off-diagonal entries of C become
undirected edge weights (number of posts containing both terms).

Key techniques:
- Binary incidence (term presence, not count)
- Sparse product and upper-triangle extraction (i < j)
- Cached node strengths and degrees
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from loguru import logger
from scipy import sparse

from ..lexicon.dictionary import TermDictionary
from ..lexicon.dtm import DocTermMatrix


@dataclass(frozen=True)
class BipartiteIncidence:
    """Terms (part A) x posts (part B) 0/1 incidence matrix."""
    part_a: Tuple[str, ...]
    part_b: Tuple[str, ...]
    incidence: sparse.csr_matrix

    @classmethod
    def from_dtm(cls, dtm: DocTermMatrix) -> "BipartiteIncidence":
        m = (dtm.matrix.T > 0).astype(np.int64).tocsr()
        return cls(part_a=dtm.cols, part_b=dtm.rows, incidence=m)


@dataclass(frozen=True)
class TermNetwork:
    """
    Weighted undirected term graph.

    Edges are stored once as index pairs (src < dst) into ``nodes``.
    """
    nodes: Tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    labels: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise ValueError("edge arrays differ in length")
        if len(self.src) and np.any(self.src >= self.dst):
            raise ValueError("edges must be stored with src < dst and no self-loops")
        if len(self.weight) and np.any(self.weight <= 0):
            raise ValueError("edge weights must be positive")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def node_strengths(self) -> np.ndarray:
        s = np.zeros(self.n_nodes, dtype=float)
        np.add.at(s, self.src, self.weight)
        np.add.at(s, self.dst, self.weight)
        return s

    @property
    def node_degrees(self) -> np.ndarray:
        k = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(k, self.src, 1)
        np.add.at(k, self.dst, 1)
        return k

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def edge_list(self):
        """(term_i, term_j, weight) triples in storage order."""
        return [
            (self.nodes[i], self.nodes[j], self.weight[e].item())
            for e, (i, j) in enumerate(zip(self.src, self.dst))
        ]

    def with_labels(self, dictionary: TermDictionary) -> "TermNetwork":
        labels = {t: dictionary.entries[t] for t in self.nodes if t in dictionary}
        return TermNetwork(self.nodes, self.src, self.dst, self.weight, labels)

    def subgraph(self, mask: np.ndarray) -> "TermNetwork":
        """Same nodes, only the edges selected by ``mask``."""
        return TermNetwork(
            self.nodes, self.src[mask], self.dst[mask], self.weight[mask], dict(self.labels)
        )

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for term in self.nodes:
            if term in self.labels:
                g.add_node(term, label=self.labels[term])
            else:
                g.add_node(term)
        g.add_weighted_edges_from(self.edge_list())
        return g

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "term_i": [self.nodes[i] for i in self.src],
            "term_j": [self.nodes[j] for j in self.dst],
            "weight": self.weight,
        })

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, nodes: Optional[Tuple[str, ...]] = None) -> "TermNetwork":
        """
        Rebuild from an edge list with columns term_i, term_j, weight.

        Nodes default to the sorted set of endpoints; pass ``nodes`` to keep
        isolated terms.
        """
        ti = frame["term_i"].astype(str).tolist()
        tj = frame["term_j"].astype(str).tolist()
        if nodes is None:
            nodes = tuple(sorted(set(ti) | set(tj)))
        index = {t: k for k, t in enumerate(nodes)}
        a = np.array([index[t] for t in ti], dtype=np.int64)
        b = np.array([index[t] for t in tj], dtype=np.int64)
        src, dst = np.minimum(a, b), np.maximum(a, b)
        weight = frame["weight"].to_numpy()
        order = np.lexsort((dst, src))
        return cls(tuple(nodes), src[order], dst[order], weight[order])


def project_cooccurrence(dtm: DocTermMatrix) -> TermNetwork:
    """
    Project the post-term structure onto terms (C = M Mᵀ, diagonal dropped).

    A post contributes 1 to a pair regardless of repeated occurrences.
    """
    if dtm.shape[1] == 0:
        raise ValueError("document-term matrix has no columns")
    incidence = BipartiteIncidence.from_dtm(dtm)
    m = incidence.incidence
    c = sparse.triu(m @ m.T, k=1).tocoo()
    order = np.lexsort((c.col, c.row))
    net = TermNetwork(
        nodes=incidence.part_a,
        src=c.row[order].astype(np.int64),
        dst=c.col[order].astype(np.int64),
        weight=c.data[order].astype(np.int64),
    )
    if net.n_nodes == 1:
        logger.warning("Document-term matrix has a single column: network has 1 node and no edges")
    logger.info("Projected co-occurrence network: {} nodes, {} edges", net.n_nodes, net.n_edges)
    return net

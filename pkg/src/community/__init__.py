"""
Community Module - Community Detection on Term Backbones

This module handles:
- Weighted modularity
- Walktrap, Multilevel (Louvain) and Fast greedy detection
- Dendrograms with modularity-maximizing cuts
- Concordance with a reference labeling (optimal assignment)
"""

import asyncio
from typing import Dict, Sequence

from .graph import GraphLike, WeightedGraph, as_weighted_graph, modularity, modularity_from_labels
from .partition import (
    ALGORITHMS,
    Dendrogram,
    Merge,
    Partition,
    canonical_labels,
    concordance,
    reference_partition,
)
from .walktrap import DEFAULT_WALK_LENGTH, walktrap
from .multilevel import multilevel
from .fastgreedy import fastgreedy


def detect(graph: GraphLike, algorithm: str, walk_length: int = DEFAULT_WALK_LENGTH) -> Partition:
    """Run one algorithm by name."""
    if algorithm == "walktrap":
        return walktrap(graph, walk_length)
    if algorithm == "multilevel":
        return multilevel(graph)
    if algorithm == "fastgreedy":
        return fastgreedy(graph)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


async def detect_all(
    graph: GraphLike,
    algorithms: Sequence[str] = ALGORITHMS,
    walk_length: int = DEFAULT_WALK_LENGTH,
) -> Dict[str, Partition]:
    """Run several algorithms concurrently on the same graph."""
    wg = as_weighted_graph(graph)
    results = await asyncio.gather(
        *(asyncio.to_thread(detect, wg, algo, walk_length) for algo in algorithms)
    )
    return dict(zip(algorithms, results))


__all__ = [
    "ALGORITHMS",
    "DEFAULT_WALK_LENGTH",
    "Dendrogram",
    "GraphLike",
    "Merge",
    "Partition",
    "WeightedGraph",
    "as_weighted_graph",
    "canonical_labels",
    "concordance",
    "detect",
    "detect_all",
    "fastgreedy",
    "modularity",
    "modularity_from_labels",
    "multilevel",
    "reference_partition",
    "walktrap",
]

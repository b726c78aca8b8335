"""
Synthgen Module - Synthetic Corpora with Planted Ground Truth

This module handles:
- Generator specs (including the reference-shaped preset) and ledgers
- Synthetic corpus generation with exact event accounting
- Planted-partition graphs with reference partitions
- Correlated count and ordinal-response fixtures
"""

from .spec import GeneratorLedger, GeneratorSpec, PowerLawParams
from .corpus_generator import (
    CorpusGenerator,
    generate_corpus,
    largest_remainder,
    load_ledger,
    planted_dictionary,
    write_synthetic,
)
from .fixtures import generate_correlated_counts, generate_planted_partition_graph, simulate_pom

__all__ = [
    "CorpusGenerator",
    "GeneratorLedger",
    "GeneratorSpec",
    "PowerLawParams",
    "generate_corpus",
    "generate_correlated_counts",
    "generate_planted_partition_graph",
    "largest_remainder",
    "load_ledger",
    "planted_dictionary",
    "simulate_pom",
    "write_synthetic",
]

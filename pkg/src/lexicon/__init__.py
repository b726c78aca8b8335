"""
Lexicon Module - Tokenization and Document-Term Matrices

This module handles:
- Message tokenization with configurable normalization
- Labeled term dictionaries (CSV term,label[,confidence])
- Sparse document-term matrix construction and occurrence filtering
- Restriction of the matrix to dictionary terms
"""

from .tokenizer import (
    DEFAULT_NORMALIZATION,
    Normalization,
    PhraseMatcher,
    normalize_term,
    tokenize,
)
from .dictionary import DEFAULT_TOPICS, TermDictionary, load_dictionary
from .dtm import DocTermMatrix, build_dtm, count_terms, restrict_to_dictionary

__all__ = [
    "DEFAULT_NORMALIZATION",
    "DEFAULT_TOPICS",
    "DocTermMatrix",
    "Normalization",
    "PhraseMatcher",
    "TermDictionary",
    "build_dtm",
    "count_terms",
    "load_dictionary",
    "normalize_term",
    "restrict_to_dictionary",
    "tokenize",
]

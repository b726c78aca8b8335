"""
Message tokenization and phrase merging.
"""

import re
import unicodedata
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

_WORD = re.compile(r"\w+", re.UNICODE)
_WHITESPACE = re.compile(r"\S+")


@dataclass(frozen=True)
class Normalization:
    """Text normalization applied before splitting."""
    lowercase: bool = True
    strip_punctuation: bool = True
    fold_accents: bool = False
    stemmer: Optional[Callable[[str], str]] = None


DEFAULT_NORMALIZATION = Normalization()


def fold_accents(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def tokenize(message: str, normalization: Normalization = DEFAULT_NORMALIZATION) -> List[str]:
    """
    Split a message into terms.

    Args:
        message: Raw post text
        normalization: Case, punctuation, accent and stemming options

    Returns:
        Terms in message order (empty for an empty message)
    """
    if not message:
        return []
    text = message.casefold() if normalization.lowercase else message
    if normalization.fold_accents:
        text = fold_accents(text)
    pattern = _WORD if normalization.strip_punctuation else _WHITESPACE
    tokens = pattern.findall(text)
    # \w keeps underscores; a bare run of them is not a term
    tokens = [t for t in tokens if t.strip("_")]
    if normalization.stemmer is not None:
        tokens = [normalization.stemmer(t) for t in tokens]
    return tokens


def normalize_term(term: str, normalization: Normalization = DEFAULT_NORMALIZATION) -> str:
    """Canonical form of a (possibly multi-word) dictionary term."""
    return " ".join(tokenize(term, normalization))


class PhraseMatcher:
    """
    Greedy longest-first merger of multi-word terms.

    Token sequences matching a phrase are replaced by one space-joined term;
    everything else passes through unchanged.
    """

    def __init__(self, phrases: Iterable[str]):
        self._by_first: Dict[str, List[Tuple[str, ...]]] = {}
        for phrase in phrases:
            parts = tuple(phrase.split())
            if len(parts) < 2:
                continue
            self._by_first.setdefault(parts[0], []).append(parts)
        for candidates in self._by_first.values():
            candidates.sort(key=lambda p: (-len(p), p))

    def __bool__(self) -> bool:
        return bool(self._by_first)

    def merge(self, tokens: Sequence[str]) -> List[str]:
        if not self._by_first:
            return list(tokens)
        out: List[str] = []
        i = 0
        n = len(tokens)
        while i < n:
            match = None
            for parts in self._by_first.get(tokens[i], ()):
                if tuple(tokens[i:i + len(parts)]) == parts:
                    match = parts
                    break
            if match is None:
                out.append(tokens[i])
                i += 1
            else:
                out.append(" ".join(match))
                i += len(match)
        return out

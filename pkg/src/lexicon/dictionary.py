"""
Labeled term dictionary.

The dictionary file is a CSV with columns term,label and an optional
confidence column; rows below the confidence cut are dropped.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd
from loguru import logger

from ..errors import DictionaryError
from .tokenizer import DEFAULT_NORMALIZATION, Normalization, normalize_term

DEFAULT_TOPICS = ("environment", "health", "diet", "geopolitics")


@dataclass(frozen=True)
class TermDictionary:
    """Map term -> topic label over a closed label set."""
    entries: Dict[str, str]
    labels: Tuple[str, ...] = DEFAULT_TOPICS

    def __post_init__(self):
        for term, label in self.entries.items():
            if not term:
                raise DictionaryError("empty term in dictionary")
            if label not in self.labels:
                raise DictionaryError(
                    f"term '{term}' has label '{label}' outside {list(self.labels)}"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, term: str) -> bool:
        return term in self.entries

    def label_of(self, term: str) -> Optional[str]:
        return self.entries.get(term)

    @property
    def phrases(self) -> List[str]:
        """Multi-word terms, matched as token sequences."""
        return [t for t in self.entries if " " in t]

    def terms_for(self, label: str) -> List[str]:
        return [t for t, lab in self.entries.items() if lab == label]

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[Tuple[str, str]],
        labels: Sequence[str] = DEFAULT_TOPICS,
        normalization: Normalization = DEFAULT_NORMALIZATION,
    ) -> "TermDictionary":
        entries: Dict[str, str] = {}
        for raw, label in pairs:
            term = normalize_term(str(raw), normalization)
            if not term:
                raise DictionaryError(f"term '{raw}' is empty after normalization")
            if term in entries:
                raise DictionaryError(f"duplicate term '{term}'")
            entries[term] = str(label).strip()
        return cls(entries=entries, labels=tuple(labels))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"term": list(self.entries), "label": list(self.entries.values())}
        )


def load_dictionary(
    path: Union[str, Path],
    labels: Sequence[str] = DEFAULT_TOPICS,
    min_confidence: float = 0.9,
    normalization: Normalization = DEFAULT_NORMALIZATION,
) -> TermDictionary:
    """
    Load a labeled term dictionary from CSV.

    Args:
        path: CSV file with term,label[,confidence]
        labels: Allowed topic labels
        min_confidence: Rows with confidence below this are dropped
        normalization: Applied to every term

    Returns:
        Validated TermDictionary
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dictionary file not found: {path}")
    if not 0.0 <= min_confidence <= 1.0:
        raise ValueError(f"min_confidence must be in [0, 1], got {min_confidence}")

    frame = pd.read_csv(path, dtype={"term": str, "label": str})
    missing = {"term", "label"} - set(frame.columns)
    if missing:
        raise DictionaryError(f"dictionary {path} lacks columns {sorted(missing)}")

    if "confidence" in frame.columns:
        before = len(frame)
        frame = frame[frame["confidence"].astype(float) >= min_confidence]
        dropped = before - len(frame)
        if dropped:
            logger.info("Dropped {} dictionary rows below confidence {}", dropped, min_confidence)

    if frame["term"].isna().any() or frame["label"].isna().any():
        raise DictionaryError(f"dictionary {path} has empty term or label cells")

    dictionary = TermDictionary.from_pairs(
        zip(frame["term"], frame["label"]), labels=labels, normalization=normalization
    )
    logger.info("Loaded dictionary with {} terms over {} topics", len(dictionary), len(labels))
    return dictionary

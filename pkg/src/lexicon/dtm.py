"""
Document-Term Matrix

Sparse posts x terms count matrix built from tokenized messages, filtered
by a strict occurrence threshold and optionally restricted to a dictionary.

Key techniques:
- Per-post Counter reduction into a scipy.sparse COO/CSR matrix
- Column marginals cached and checked against column sums
- Triplet (post_id, term, count) serialization
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy import sparse
from tqdm import tqdm

from ..corpus.models import Corpus
from ..errors import DictionaryDisjointError, EmptyDocumentSetError, EmptyVocabularyError
from .dictionary import TermDictionary
from .tokenizer import DEFAULT_NORMALIZATION, Normalization, PhraseMatcher, tokenize


@dataclass(frozen=True)
class DocTermMatrix:
    """Rows are post ids, columns are terms, entries are counts."""
    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    matrix: sparse.csr_matrix
    marginals: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (len(self.rows), len(self.cols)):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{len(self.rows)} rows x {len(self.cols)} cols"
            )
        col_sums = np.asarray(self.matrix.sum(axis=0)).ravel()
        if not np.array_equal(col_sums, self.marginals):
            raise ValueError("marginals differ from column sums")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def column_index(self) -> Dict[str, int]:
        return {t: j for j, t in enumerate(self.cols)}

    def row_counts(self, post_id: str) -> Dict[str, int]:
        """Non-zero term counts of one post."""
        i = self.rows.index(post_id)
        row = self.matrix.getrow(i)
        return {self.cols[j]: int(v) for j, v in zip(row.indices, row.data)}

    def to_frame(self) -> pd.DataFrame:
        """
        Long ``post_id,term,count`` triplets in row order.

        A post without any kept term is written as ``post_id,,0`` and a term
        without any count as ``,term,0``, so the shape survives a round trip.
        """
        coo = self.matrix.tocoo()
        records = [
            (int(i), int(j), self.rows[i], self.cols[j], int(v))
            for i, j, v in zip(coo.row, coo.col, coo.data)
        ]
        empty_rows = np.flatnonzero(np.diff(self.matrix.indptr) == 0)
        records += [(int(i), -1, self.rows[i], "", 0) for i in empty_rows]
        records += [(len(self.rows), int(j), "", self.cols[j], 0) for j in np.flatnonzero(self.marginals == 0)]
        records.sort(key=lambda r: (r[0], r[1]))
        return pd.DataFrame(
            {
                "post_id": [r[2] for r in records],
                "term": [r[3] for r in records],
                "count": np.asarray([r[4] for r in records], dtype=np.int64),
            }
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "DocTermMatrix":
        """Rebuild from ``to_frame`` output; rows keep first-seen order, columns are sorted."""
        frame = frame.fillna({"post_id": "", "term": ""})
        post_ids = frame["post_id"].astype(str).tolist()
        terms = frame["term"].astype(str).tolist()
        counts = frame["count"].astype(np.int64).tolist()
        rows = tuple(dict.fromkeys(p for p in post_ids if p))
        cols = tuple(sorted({t for t in terms if t}))
        return _assemble(rows, cols, [(p, t, c) for p, t, c in zip(post_ids, terms, counts) if p and t and c])


def _assemble(
    rows: Sequence[str], cols: Sequence[str], triplets: Iterable[Tuple[str, str, int]]
) -> DocTermMatrix:
    row_idx = {r: i for i, r in enumerate(rows)}
    col_idx = {c: j for j, c in enumerate(cols)}
    r_list: List[int] = []
    c_list: List[int] = []
    v_list: List[int] = []
    for post_id, term, count in triplets:
        r_list.append(row_idx[post_id])
        c_list.append(col_idx[term])
        v_list.append(count)
    matrix = sparse.coo_matrix(
        (np.asarray(v_list, dtype=np.int64), (np.asarray(r_list, dtype=np.int64), np.asarray(c_list, dtype=np.int64))),
        shape=(len(rows), len(cols)),
    ).tocsr()
    matrix.sum_duplicates()
    marginals = np.asarray(matrix.sum(axis=0)).ravel().astype(np.int64)
    return DocTermMatrix(rows=tuple(rows), cols=tuple(cols), matrix=matrix, marginals=marginals)


def count_terms(
    message: str,
    normalization: Normalization = DEFAULT_NORMALIZATION,
    phrases: Optional[PhraseMatcher] = None,
) -> Counter:
    """Term counts of one message after phrase merging."""
    tokens = tokenize(message, normalization)
    if phrases:
        tokens = phrases.merge(tokens)
    return Counter(tokens)


def build_dtm(
    corpus: Corpus,
    min_occurrences: int = 500,
    normalization: Normalization = DEFAULT_NORMALIZATION,
    phrases: Sequence[str] = (),
    on_empty: Literal["error", "empty"] = "error",
    progress: bool = False,
) -> DocTermMatrix:
    """
    Build the document-term matrix over posts with a message.

    Args:
        corpus: Ingested corpus
        min_occurrences: Keep terms occurring strictly more than this often
        normalization: Tokenizer options
        phrases: Multi-word terms merged into single tokens first
        on_empty: "error" raises when no term survives; "empty" returns a
            matrix with zero columns
        progress: Show a tqdm bar over posts

    Returns:
        DocTermMatrix with columns sorted by term
    """
    if min_occurrences < 1:
        raise ValueError(f"min_occurrences must be >= 1, got {min_occurrences}")

    documents = corpus.posts_with_message()
    if not documents:
        raise EmptyDocumentSetError()

    matcher = PhraseMatcher(phrases)
    per_post: List[Tuple[str, Counter]] = []
    totals: Counter = Counter()
    for post in tqdm(documents, desc="Tokenizing", disable=not progress):
        counts = count_terms(post.message, normalization, matcher)
        per_post.append((post.post_id, counts))
        totals.update(counts)

    kept = sorted(t for t, c in totals.items() if c > min_occurrences)
    if not kept and on_empty == "error":
        raise EmptyVocabularyError(
            f"no term occurs more than {min_occurrences} times "
            f"(max count {max(totals.values(), default=0)})"
        )

    keep = set(kept)
    rows = [post_id for post_id, _ in per_post]
    triplets = (
        (post_id, term, count)
        for post_id, counts in per_post
        for term, count in counts.items()
        if term in keep
    )
    dtm = _assemble(rows, kept, triplets)
    logger.info(
        "Built document-term matrix {} x {} (threshold > {}, vocabulary {})",
        dtm.shape[0], dtm.shape[1], min_occurrences, len(totals),
    )
    return dtm


def restrict_to_dictionary(dtm: DocTermMatrix, dictionary: TermDictionary) -> DocTermMatrix:
    """
    Keep only the dictionary's columns; every row is retained.

    Raises:
        DictionaryDisjointError: no dtm term is in the dictionary
    """
    keep = [j for j, term in enumerate(dtm.cols) if term in dictionary]
    if not keep:
        raise DictionaryDisjointError()
    if len(keep) == len(dtm.cols):
        return dtm

    matrix = dtm.matrix[:, keep].tocsr()
    cols = tuple(dtm.cols[j] for j in keep)
    restricted = DocTermMatrix(
        rows=dtm.rows, cols=cols, matrix=matrix, marginals=dtm.marginals[keep].copy()
    )
    logger.info("Restricted matrix to {} dictionary terms", len(cols))
    return restricted

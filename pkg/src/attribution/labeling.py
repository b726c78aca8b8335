"""
Majority-rule post labeling.

A post takes the topic holding a strict plurality of its matched dictionary
terms. Ties and posts without dictionary terms stay unlabeled.
"""

from typing import Dict, Literal, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from ..corpus.models import Corpus
from ..lexicon.dictionary import TermDictionary
from ..lexicon.dtm import DocTermMatrix

UNLABELED = "unlabeled"

LabelMode = Literal["presence", "occurrence"]


def topic_scores(dtm: DocTermMatrix, dictionary: TermDictionary, mode: LabelMode = "presence") -> np.ndarray:
    """Posts x topics matrix of matched-term weights."""
    if mode not in ("presence", "occurrence"):
        raise ValueError(f"mode must be 'presence' or 'occurrence', got {mode!r}")
    topics = list(dictionary.labels)
    topic_of = np.full(len(dtm.cols), -1, dtype=np.int64)
    for j, term in enumerate(dtm.cols):
        label = dictionary.label_of(term)
        if label is not None:
            topic_of[j] = topics.index(label)

    x = dtm.matrix.tocsr()
    if mode == "presence":
        x = (x > 0).astype(np.int64)
    coo = x.tocoo()
    keep = topic_of[coo.col] >= 0
    scores = np.zeros((dtm.shape[0], len(topics)), dtype=np.int64)
    np.add.at(scores, (coo.row[keep], topic_of[coo.col[keep]]), coo.data[keep])
    return scores


def majority_label(scores: np.ndarray, topics: Sequence[str]) -> str:
    """Strict-plurality topic of one score row, else unlabeled."""
    best = scores.max() if len(scores) else 0
    if best <= 0:
        return UNLABELED
    winners = np.flatnonzero(scores == best)
    return topics[int(winners[0])] if len(winners) == 1 else UNLABELED


def label_posts(
    corpus: Corpus,
    dtm: DocTermMatrix,
    dictionary: TermDictionary,
    mode: LabelMode = "presence",
) -> Dict[str, str]:
    """
    Label every post with a message.

    Args:
        corpus: Source corpus (defines the posts with a message)
        dtm: Document-term matrix, ideally restricted to the dictionary
        dictionary: Term -> topic map
        mode: "presence" counts each matched term once per post,
            "occurrence" counts repetitions

    Returns:
        post_id -> topic or "unlabeled"
    """
    topics = list(dictionary.labels)
    scores = topic_scores(dtm, dictionary, mode)
    by_row = {post_id: majority_label(scores[i], topics) for i, post_id in enumerate(dtm.rows)}

    labels: Dict[str, str] = {}
    for post in corpus.posts_with_message():
        labels[post.post_id] = by_row.get(post.post_id, UNLABELED)

    counts = label_counts(labels, topics)
    logger.info(
        "Labeled {} of {} posts: {}",
        int(counts.loc[counts["label"] != UNLABELED, "posts"].sum()),
        len(labels),
        dict(zip(counts["label"], counts["posts"])),
    )
    return labels


def label_counts(labels: Mapping[str, str], topics: Sequence[str]) -> pd.DataFrame:
    """Posts per topic plus the unlabeled count."""
    values = list(labels.values())
    rows = [{"label": t, "posts": values.count(t)} for t in topics]
    rows.append({"label": UNLABELED, "posts": values.count(UNLABELED)})
    return pd.DataFrame(rows)


def labels_to_frame(labels: Mapping[str, str]) -> pd.DataFrame:
    return pd.DataFrame({"post_id": list(labels), "label": list(labels.values())})


def labels_from_frame(frame: pd.DataFrame) -> Dict[str, str]:
    return dict(zip(frame["post_id"].astype(str), frame["label"].astype(str)))


def post_topic(labels: Mapping[str, str], post_id: str) -> Optional[str]:
    """Topic of a post, None when unlabeled or without a message."""
    label = labels.get(post_id, UNLABELED)
    return None if label == UNLABELED else label

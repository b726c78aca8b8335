"""
Cross-topic mobility statistics: Pearson matrix of per-topic like counts and
engagement summaries by number of topics liked.
"""

from typing import Mapping, Sequence, Tuple

import numpy as np
import pandas as pd

from ..lexicon.dictionary import DEFAULT_TOPICS
from .users import UserProfile

MIN_LIKES = 4


def like_matrix(
    profiles: Mapping[str, UserProfile],
    topics: Sequence[str] = DEFAULT_TOPICS,
    restrict_polarized: bool = False,
) -> np.ndarray:
    """Users x topics like counts over users with at least one labeled-topic like."""
    rows = []
    for p in profiles.values():
        if restrict_polarized and p.polarization is None:
            continue
        counts = [p.likes_per_topic.get(t, 0) for t in topics]
        if sum(counts) > 0:
            rows.append(counts)
    return np.asarray(rows, dtype=float).reshape(-1, len(topics))


def pearson_matrix(x: np.ndarray) -> np.ndarray:
    """Column-wise Pearson coefficients; NaN where a column has zero variance."""
    centered = x - x.mean(axis=0)
    ss = np.sqrt((centered ** 2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = (centered.T @ centered) / np.outer(ss, ss)
    corr[:, ss == 0] = np.nan
    corr[ss == 0, :] = np.nan
    corr = np.clip(corr, -1.0, 1.0)
    diag = np.where(ss > 0, 1.0, np.nan)
    np.fill_diagonal(corr, diag)
    return corr


def topic_correlations(
    profiles: Mapping[str, UserProfile],
    topics: Sequence[str] = DEFAULT_TOPICS,
    restrict_polarized: bool = False,
) -> pd.DataFrame:
    """
    Pearson correlations of per-topic like counts.

    Args:
        profiles: User profiles
        topics: Topic order of the matrix
        restrict_polarized: Only use polarized users

    Returns:
        Symmetric topics x topics DataFrame; undefined entries are NaN
    """
    x = like_matrix(profiles, topics, restrict_polarized)
    if x.shape[0] < 2:
        raise ValueError(f"topic_correlations needs at least 2 users, got {x.shape[0]}")
    return pd.DataFrame(pearson_matrix(x), index=list(topics), columns=list(topics))


def engaged_users(profiles: Mapping[str, UserProfile], min_likes: int = MIN_LIKES):
    """Users with at least ``min_likes`` likes and at least one topic liked."""
    return [p for p in profiles.values() if p.total_likes >= min_likes and p.topics_liked > 0]


def engagement_by_topic_count(
    profiles: Mapping[str, UserProfile],
    topics: Sequence[str] = DEFAULT_TOPICS,
    min_likes: int = MIN_LIKES,
) -> pd.DataFrame:
    """
    Distribution of total likes by number of distinct topics liked.

    One row per k in 1..len(topics): users, q25, median, q75, min, max.
    Empty buckets report 0 users and NaN statistics.
    """
    users = engaged_users(profiles, min_likes)
    rows = []
    for k in range(1, len(topics) + 1):
        likes = np.array([p.total_likes for p in users if p.topics_liked == k], dtype=float)
        if len(likes):
            q25, median, q75 = np.percentile(likes, [25, 50, 75])
            rows.append({
                "topics": k, "users": len(likes), "q25": q25, "median": median,
                "q75": q75, "min": likes.min(), "max": likes.max(),
            })
        else:
            rows.append({
                "topics": k, "users": 0, "q25": np.nan, "median": np.nan,
                "q75": np.nan, "min": np.nan, "max": np.nan,
            })
    return pd.DataFrame(rows)


def mobility_observations(
    profiles: Mapping[str, UserProfile], min_likes: int = MIN_LIKES
) -> Tuple[np.ndarray, np.ndarray]:
    """(total likes, number of topics liked) for engaged users, in user order."""
    users = engaged_users(profiles, min_likes)
    x = np.array([p.total_likes for p in users], dtype=float)
    y = np.array([p.topics_liked for p in users], dtype=np.int64)
    return x, y

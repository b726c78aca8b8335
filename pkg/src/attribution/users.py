"""
User Profiles and Polarization

Aggregates each user's likes and comments per topic and applies the
concentration rule: a user is polarized toward topic t when
likes_on_t / total_likes >= threshold. Likes on unlabeled posts (and on
posts without a message) count in the denominator.

Key techniques:
- Single pass over posts, per-user counters
- Optional page-category prefilter selecting the eligible users
- Polarization table (topic, users, percent of polarized users)
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import pandas as pd
from loguru import logger

from ..corpus.models import Corpus
from ..lexicon.dictionary import DEFAULT_TOPICS
from .labeling import post_topic

DEFAULT_THRESHOLD = 0.95


@dataclass
class UserProfile:
    """Per-topic activity of one user; comment times cover only topics the user commented on."""
    user_id: str
    likes_per_topic: Dict[str, int] = field(default_factory=dict)
    comments_per_topic: Dict[str, int] = field(default_factory=dict)
    total_likes: int = 0
    total_comments: int = 0
    polarization: Optional[str] = None
    first_comment_t: Dict[str, int] = field(default_factory=dict)
    last_comment_t: Dict[str, int] = field(default_factory=dict)

    @property
    def unlabeled_likes(self) -> int:
        return self.total_likes - sum(self.likes_per_topic.values())

    @property
    def unlabeled_comments(self) -> int:
        return self.total_comments - sum(self.comments_per_topic.values())

    @property
    def topics_liked(self) -> int:
        """Number of distinct topics with at least one like."""
        return sum(1 for c in self.likes_per_topic.values() if c > 0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "user_id": self.user_id,
            "polarized_topic": self.polarization or "",
            "total_likes": self.total_likes,
            "total_comments": self.total_comments,
        }


def _validate_threshold(threshold: float) -> None:
    if not 0.5 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0.5, 1], got {threshold}")


def polarized_topic(likes_per_topic: Mapping[str, int], total_likes: int, threshold: float) -> Optional[str]:
    """The single topic holding at least ``threshold`` of the likes, if any."""
    if total_likes <= 0:
        return None
    hits = [t for t, c in likes_per_topic.items() if c / total_likes >= threshold]
    return hits[0] if len(hits) == 1 else None


def eligible_users(corpus: Corpus, category: str, threshold: float = DEFAULT_THRESHOLD) -> set:
    """Users with at least ``threshold`` of their likes on pages of ``category``."""
    _validate_threshold(threshold)
    on_category: Dict[str, int] = {}
    total: Dict[str, int] = {}
    for post in corpus.posts.values():
        hit = corpus.page_categories.get(post.page_id) == category
        for user, _ in post.like_events:
            total[user] = total.get(user, 0) + 1
            if hit:
                on_category[user] = on_category.get(user, 0) + 1
    return {u for u, n in total.items() if on_category.get(u, 0) / n >= threshold}


def classify_users(
    corpus: Corpus,
    post_labels: Mapping[str, str],
    threshold: float = DEFAULT_THRESHOLD,
    topics: Sequence[str] = DEFAULT_TOPICS,
    eligible_category: Optional[str] = None,
) -> Dict[str, UserProfile]:
    """
    Build a profile for every acting user and mark polarization.

    Args:
        corpus: Ingested corpus
        post_labels: post_id -> topic or "unlabeled"
        threshold: Concentration needed to be polarized, in (0.5, 1]
        topics: Topic set of the run
        eligible_category: When set, only users whose likes fall on pages of
            this category (at the same threshold) are profiled

    Returns:
        user_id -> UserProfile, sorted by user id
    """
    _validate_threshold(threshold)
    eligible = eligible_users(corpus, eligible_category, threshold) if eligible_category else None

    profiles: Dict[str, UserProfile] = {}

    def profile(user: str) -> Optional[UserProfile]:
        if eligible is not None and user not in eligible:
            return None
        if user not in profiles:
            profiles[user] = UserProfile(
                user_id=user,
                likes_per_topic={t: 0 for t in topics},
                comments_per_topic={t: 0 for t in topics},
            )
        return profiles[user]

    for post in corpus.posts.values():
        topic = post_topic(post_labels, post.post_id)
        if topic is not None and topic not in topics:
            topic = None
        for user, _ in post.like_events:
            p = profile(user)
            if p is None:
                continue
            p.total_likes += 1
            if topic is not None:
                p.likes_per_topic[topic] += 1
        for user, t in post.comment_events:
            p = profile(user)
            if p is None:
                continue
            p.total_comments += 1
            if topic is not None:
                p.comments_per_topic[topic] += 1
                p.first_comment_t[topic] = min(p.first_comment_t.get(topic, t), t)
                p.last_comment_t[topic] = max(p.last_comment_t.get(topic, t), t)

    for p in profiles.values():
        p.polarization = polarized_topic(p.likes_per_topic, p.total_likes, threshold)

    ordered = {u: profiles[u] for u in sorted(profiles)}
    n_polarized = sum(1 for p in ordered.values() if p.polarization)
    logger.info(
        "Classified {} users, {} polarized (threshold {})",
        len(ordered), n_polarized, threshold,
    )
    return ordered


def polarization_table(profiles: Mapping[str, UserProfile], topics: Sequence[str] = DEFAULT_TOPICS) -> pd.DataFrame:
    """Polarized users per topic with their share of all polarized users."""
    counts = {t: 0 for t in topics}
    for p in profiles.values():
        if p.polarization in counts:
            counts[p.polarization] += 1
    total = sum(counts.values())
    return pd.DataFrame([
        {"topic": t, "users": n, "percent": (100.0 * n / total) if total else 0.0}
        for t, n in counts.items()
    ])


def profiles_to_frame(profiles: Mapping[str, UserProfile], topics: Sequence[str] = DEFAULT_TOPICS) -> pd.DataFrame:
    rows = []
    for p in profiles.values():
        row = p.to_dict()
        for t in topics:
            row[f"likes_{t}"] = p.likes_per_topic.get(t, 0)
            row[f"comments_{t}"] = p.comments_per_topic.get(t, 0)
        rows.append(row)
    columns = ["user_id", "polarized_topic", "total_likes", "total_comments"]
    columns += [f"{kind}_{t}" for t in topics for kind in ("likes", "comments")]
    return pd.DataFrame(rows, columns=columns)


def polarized_share(profiles: Mapping[str, UserProfile]) -> Tuple[int, float]:
    """(polarized users, fraction of all profiled users)."""
    n = sum(1 for p in profiles.values() if p.polarization)
    return n, (n / len(profiles)) if profiles else 0.0

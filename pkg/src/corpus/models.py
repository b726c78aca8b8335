"""
Corpus domain types.

PostRecord is the wire schema of one input line (validated with pydantic);
Post and Corpus are the immutable in-memory forms every analysis reads.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

import pandas as pd


# =============================================================================
# WIRE SCHEMA
# =============================================================================

class EventRecord(BaseModel):
    """A like or comment as it appears in a post record."""
    model_config = ConfigDict(extra="forbid")

    user: str = Field(..., min_length=1, description="Acting user id")
    t: int = Field(..., ge=0, description="Epoch seconds")


class PostRecord(BaseModel):
    """One line of the corpus file."""
    model_config = ConfigDict(extra="ignore")

    post_id: str = Field(..., min_length=1)
    page_id: str = Field(..., min_length=1)
    created_at: int = Field(..., ge=0, description="Epoch seconds")
    message: str = Field(default="")
    likes: List[EventRecord] = Field(default_factory=list)
    comments: List[EventRecord] = Field(default_factory=list)
    shares: int = Field(default=0, ge=0)
    category: Optional[str] = Field(default=None, description="Page category")


# =============================================================================
# DOMAIN TYPES
# =============================================================================

Event = Tuple[str, int]


@dataclass(frozen=True)
class Post:
    """A post with its like/comment events sorted by (time, user)."""
    post_id: str
    page_id: str
    created_at: int
    message: str
    like_events: Tuple[Event, ...]
    comment_events: Tuple[Event, ...]
    share_count: int
    category: Optional[str] = None

    @property
    def has_message(self) -> bool:
        return bool(self.message.strip())

    @classmethod
    def from_record(cls, record: PostRecord) -> "Post":
        return cls(
            post_id=record.post_id,
            page_id=record.page_id,
            created_at=record.created_at,
            message=record.message,
            like_events=_sorted_events(record.likes),
            comment_events=_sorted_events(record.comments),
            share_count=record.shares,
            category=record.category,
        )

    def to_record(self) -> PostRecord:
        return PostRecord(
            post_id=self.post_id,
            page_id=self.page_id,
            created_at=self.created_at,
            message=self.message,
            likes=[EventRecord(user=u, t=t) for u, t in self.like_events],
            comments=[EventRecord(user=u, t=t) for u, t in self.comment_events],
            shares=self.share_count,
            category=self.category,
        )


def _sorted_events(events: List[EventRecord]) -> Tuple[Event, ...]:
    return tuple(sorted(((e.user, e.t) for e in events), key=lambda ev: (ev[1], ev[0])))


@dataclass(frozen=True)
class UserActivity:
    """Post ids a user liked and commented on (one entry per event)."""
    liked: Tuple[str, ...] = ()
    commented: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Corpus:
    """
    Immutable indexed collection of posts.

    Posts keep ingestion order. Indexes are derived from the posts on
    construction, so they are consistent by definition.
    """
    posts: Dict[str, Post]
    user_index: Dict[str, UserActivity] = field(default_factory=dict)
    page_index: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    page_categories: Dict[str, Optional[str]] = field(default_factory=dict)
    observation_window: Optional[Tuple[int, int]] = None

    @classmethod
    def from_posts(cls, posts: List[Post]) -> "Corpus":
        by_id: Dict[str, Post] = {}
        liked: Dict[str, List[str]] = {}
        commented: Dict[str, List[str]] = {}
        pages: Dict[str, List[str]] = {}
        categories: Dict[str, Optional[str]] = {}
        t_min: Optional[int] = None
        t_max: Optional[int] = None

        for post in posts:
            by_id[post.post_id] = post
            pages.setdefault(post.page_id, []).append(post.post_id)
            if post.category is not None or post.page_id not in categories:
                categories[post.page_id] = post.category
            for user, _ in post.like_events:
                liked.setdefault(user, []).append(post.post_id)
            for user, _ in post.comment_events:
                commented.setdefault(user, []).append(post.post_id)
            for _, t in post.like_events + post.comment_events:
                t_min = t if t_min is None else min(t_min, t)
                t_max = t if t_max is None else max(t_max, t)

        users = sorted(set(liked) | set(commented))
        user_index = {
            u: UserActivity(tuple(liked.get(u, ())), tuple(commented.get(u, ())))
            for u in users
        }
        window = (t_min, t_max) if t_min is not None and t_max is not None else None
        return cls(
            posts=by_id,
            user_index=user_index,
            page_index={p: tuple(ids) for p, ids in pages.items()},
            page_categories=categories,
            observation_window=window,
        )

    def __len__(self) -> int:
        return len(self.posts)

    def posts_with_message(self) -> List[Post]:
        return [p for p in self.posts.values() if p.has_message]

    def check_indexes(self) -> bool:
        """Rebuild the indexes from the posts and compare."""
        rebuilt = Corpus.from_posts(list(self.posts.values()))
        return (
            rebuilt.user_index == self.user_index
            and rebuilt.page_index == self.page_index
            and rebuilt.observation_window == self.observation_window
        )


@dataclass(frozen=True)
class CorpusSummary:
    """Breakdown of a corpus by entity."""
    pages: int
    posts: int
    likes: int
    comments: int
    shares: int
    likers: int
    commenters: int

    def to_dict(self) -> Dict[str, int]:
        return {
            "pages": self.pages,
            "posts": self.posts,
            "likes": self.likes,
            "comments": self.comments,
            "shares": self.shares,
            "likers": self.likers,
            "commenters": self.commenters,
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"entity": k, "total": v} for k, v in self.to_dict().items()]
        )

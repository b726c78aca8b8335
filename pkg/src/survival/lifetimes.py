"""
Post and User Lifetimes

A post's lifetime is the time between its first and last comment; a user's
lifetime is the time between their first and last comment on posts in the
chosen scope. Units with fewer than two comments live for 0 seconds.

Lifetimes are fully observed by default. With a censor horizon T, units
whose last activity falls within T of the end of the observation window are
right-censored, since they may still be active.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from ..attribution.labeling import post_topic
from ..attribution.users import UserProfile
from ..corpus.models import Corpus
from ..errors import EmptyScopeError

Unit = Literal["post", "user"]


@dataclass
class LifetimeSample:
    """Durations in seconds with their event flags (False = right-censored)."""
    durations: np.ndarray
    observed: np.ndarray
    group: str = ""
    units: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.durations = np.asarray(self.durations, dtype=float)
        self.observed = np.asarray(self.observed, dtype=bool)
        if self.durations.shape != self.observed.shape or self.durations.ndim != 1:
            raise ValueError("durations and observed must be 1-D arrays of equal length")
        if np.any(self.durations < 0) or not np.all(np.isfinite(self.durations)):
            raise ValueError("durations must be finite and non-negative")

    def __len__(self) -> int:
        return len(self.durations)

    @property
    def n_events(self) -> int:
        return int(self.observed.sum())

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, bool]], group: str = "") -> "LifetimeSample":
        durations = [p[0] for p in pairs]
        observed = [p[1] for p in pairs]
        return cls(np.array(durations, dtype=float), np.array(observed, dtype=bool), group)

    def pairs(self) -> List[Tuple[float, bool]]:
        return [(float(d), bool(o)) for d, o in zip(self.durations, self.observed)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "group": self.group,
            "unit": self.units if len(self.units) == len(self) else [""] * len(self),
            "duration": self.durations,
            "observed": self.observed,
        })


def _censor_flags(last_activity: np.ndarray, window_end: Optional[int], horizon: Optional[float]) -> np.ndarray:
    if horizon is None or window_end is None:
        return np.ones(last_activity.shape, dtype=bool)
    if horizon < 0:
        raise ValueError(f"censor_horizon must be >= 0, got {horizon}")
    return last_activity <= window_end - horizon


def lifetimes(
    corpus: Corpus,
    post_labels: Mapping[str, str],
    unit: Unit = "post",
    scope: Optional[str] = None,
    profiles: Optional[Mapping[str, UserProfile]] = None,
    censor_horizon: Optional[float] = None,
    exclude_zero: bool = False,
) -> LifetimeSample:
    """
    Lifetimes of posts or users within a topic scope.

    Args:
        corpus: Ingested corpus
        post_labels: post_id -> topic or "unlabeled"
        unit: "post" or "user"
        scope: Topic whose posts are considered; None keeps every post
        profiles: For user lifetimes, keep only users polarized on ``scope``
        censor_horizon: Right-censor units active within this many seconds
            of the observation window end
        exclude_zero: Drop zero-length lifetimes

    Returns:
        LifetimeSample labeled with the scope

    Raises:
        EmptyScopeError: no unit falls inside the scope
    """
    if unit not in ("post", "user"):
        raise ValueError(f"unit must be 'post' or 'user', got {unit!r}")

    first: Dict[str, int] = {}
    last: Dict[str, int] = {}
    for post in corpus.posts.values():
        if scope is not None and post_topic(post_labels, post.post_id) != scope:
            continue
        if unit == "post":
            times = [t for _, t in post.comment_events]
            first[post.post_id] = times[0] if times else post.created_at
            last[post.post_id] = times[-1] if times else post.created_at
            continue
        for user, t in post.comment_events:
            if profiles is not None:
                profile = profiles.get(user)
                if profile is None or profile.polarization != scope:
                    continue
            first[user] = min(first.get(user, t), t)
            last[user] = max(last.get(user, t), t)

    units = sorted(first) if unit == "user" else list(first)
    if not units:
        raise EmptyScopeError(f"no {unit} lifetimes in scope {scope!r}")

    durations = np.array([last[u] - first[u] for u in units], dtype=float)
    last_activity = np.array([last[u] for u in units], dtype=float)
    window_end = corpus.observation_window[1] if corpus.observation_window else None
    observed = _censor_flags(last_activity, window_end, censor_horizon)

    if exclude_zero:
        keep = durations > 0
        durations, observed = durations[keep], observed[keep]
        units = [u for u, k in zip(units, keep) if k]
        if not units:
            raise EmptyScopeError(f"only zero-length {unit} lifetimes in scope {scope!r}")

    sample = LifetimeSample(durations, observed, group=scope or "all", units=units)
    logger.info(
        "{} lifetimes for {}: {} units, {} censored",
        unit.capitalize(), sample.group, len(sample), len(sample) - sample.n_events,
    )
    return sample


def lifetimes_by_topic(
    corpus: Corpus,
    post_labels: Mapping[str, str],
    topics: Sequence[str],
    unit: Unit = "post",
    profiles: Optional[Mapping[str, UserProfile]] = None,
    censor_horizon: Optional[float] = None,
    exclude_zero: bool = False,
) -> Dict[str, LifetimeSample]:
    """One sample per topic; topics with nothing in scope are skipped."""
    samples: Dict[str, LifetimeSample] = {}
    for topic in topics:
        try:
            samples[topic] = lifetimes(
                corpus, post_labels, unit=unit, scope=topic, profiles=profiles,
                censor_horizon=censor_horizon, exclude_zero=exclude_zero,
            )
        except EmptyScopeError as e:
            logger.warning("Skipping topic {}: {}", topic, e)
    return samples

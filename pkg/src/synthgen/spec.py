"""
Generator specification and ledger models.

GeneratorSpec is everything the synthetic corpus generator needs besides
the seed; GeneratorLedger is the planted ground truth it writes next to the
corpus. Both are pydantic models so they load from and dump to JSON/YAML.
"""

from typing import Dict, List, Mapping, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import GeneratorSpecError
from ..lexicon.dictionary import DEFAULT_TOPICS

# Headline magnitudes of the reference corpus at full size.
FULL_POSTS = 208_591
FULL_LIKERS = 864_047
FULL_TOPIC_USERS = 300_000
REFERENCE_DICTIONARY_SIZES = {"environment": 40, "health": 35, "diet": 22, "geopolitics": 62}
REFERENCE_POST_SHARES = {"environment": 9137, "health": 8668, "diet": 3762, "geopolitics": 22692}
REFERENCE_USER_SHARES = {"environment": 18.39, "health": 12.73, "diet": 5.94, "geopolitics": 62.95}
REFERENCE_POST_ENGAGEMENT = {
    "environment": {"likes": (2.82, 142), "comments": (2.82, 42), "shares": (2.62, 408)},
    "health": {"likes": (2.68, 172), "comments": (2.59, 37), "shares": (2.39, 435)},
    "diet": {"likes": (2.84, 135), "comments": (2.36, 15), "shares": (2.59, 358)},
    "geopolitics": {"likes": (2.36, 167), "comments": (3.14, 135), "shares": (2.25, 407)},
}
REFERENCE_POM_INTERCEPTS = (-0.7602, 1.0783, 2.9648)
REFERENCE_POM_BETA = 0.1141
DAY = 86_400


class PowerLawParams(BaseModel):
    """Discrete power law on x >= x_min."""
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(..., gt=1.0)
    x_min: int = Field(..., ge=1)


class GeneratorSpec(BaseModel):
    """Shape of a synthetic corpus."""
    model_config = ConfigDict(extra="forbid")

    topics: List[str] = Field(default_factory=lambda: list(DEFAULT_TOPICS))
    n_pages: int = Field(default=39, ge=1)
    n_posts: int = Field(default=2086, ge=1)
    n_users: int = Field(default=8640, ge=1, description="Total likers")
    n_topic_users: int = Field(default=3000, ge=0, description="Users liking labeled posts")
    page_category: str = "conspiracy"

    dictionary_sizes: Dict[str, int] = Field(default_factory=lambda: dict(REFERENCE_DICTIONARY_SIZES))
    filler_vocabulary: int = Field(default=60, ge=1)
    filler_words: Tuple[int, int] = (5, 15)
    terms_per_post: Tuple[int, int] = (3, 5)
    labeled_fraction: float = Field(default=0.6, ge=0.0, le=1.0)
    tie_fraction: float = Field(default=0.02, ge=0.0, le=1.0)
    empty_message_fraction: float = Field(default=0.0138, ge=0.0, le=1.0)
    topic_post_shares: Dict[str, float] = Field(default_factory=lambda: dict(REFERENCE_POST_SHARES))

    user_topic_shares: Dict[str, float] = Field(default_factory=lambda: dict(REFERENCE_USER_SHARES))
    user_likes: PowerLawParams = PowerLawParams(alpha=2.5, x_min=4)
    background_likes: PowerLawParams = PowerLawParams(alpha=2.2, x_min=1)
    commenter_fraction: float = Field(default=0.3, ge=0.0, le=1.0)
    user_comments: PowerLawParams = PowerLawParams(alpha=2.5, x_min=2)

    post_engagement: Dict[str, Dict[str, PowerLawParams]] = Field(
        default_factory=lambda: {
            topic: {m: PowerLawParams(alpha=a, x_min=x) for m, (a, x) in metrics.items()}
            for topic, metrics in REFERENCE_POST_ENGAGEMENT.items()
        }
    )
    engagement_scale: float = Field(default=0.1, gt=0.0, le=1.0)
    tail_fraction: float = Field(default=0.4, gt=0.0, le=1.0)

    pom_intercepts: List[float] = Field(default_factory=lambda: list(REFERENCE_POM_INTERCEPTS))
    pom_beta: float = REFERENCE_POM_BETA

    lifetime_means: Dict[str, float] = Field(
        default_factory=lambda: {
            "environment": 20 * DAY, "health": 15 * DAY, "diet": 7 * DAY, "geopolitics": 30 * DAY,
        }
    )
    window_start: int = Field(default=1_262_304_000, ge=0)
    window_days: int = Field(default=4 * 365, ge=1)

    @property
    def window_end(self) -> int:
        return self.window_start + self.window_days * DAY

    @classmethod
    def reference_shaped(cls, scale: float = 0.01) -> "GeneratorSpec":
        """Reference-corpus magnitudes scaled down by ``scale``."""
        if not 0.0 < scale <= 1.0:
            raise GeneratorSpecError("scale", f"must be in (0, 1], got {scale}")
        return cls(
            n_posts=max(1, round(FULL_POSTS * scale)),
            n_users=max(1, round(FULL_LIKERS * scale)),
            n_topic_users=max(1, round(FULL_TOPIC_USERS * scale)),
        )

    @classmethod
    def load(cls, data: Mapping) -> "GeneratorSpec":
        """Validate a mapping; errors name the offending field."""
        try:
            spec = cls.model_validate(dict(data))
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or "spec"
            raise GeneratorSpecError(field, first["msg"]) from e
        spec.check()
        return spec

    def check(self) -> None:
        """
        Cross-field validation.

        Raises:
            GeneratorSpecError: naming the first invalid field
        """
        topics = list(self.topics)
        if len(topics) < 2 or len(set(topics)) != len(topics):
            raise GeneratorSpecError("topics", "need at least 2 distinct topics")
        for name in ("dictionary_sizes", "topic_post_shares", "user_topic_shares", "lifetime_means", "post_engagement"):
            keys = set(getattr(self, name))
            if keys != set(topics):
                raise GeneratorSpecError(name, f"keys {sorted(keys)} do not match topics {sorted(topics)}")
        for topic, size in self.dictionary_sizes.items():
            if size < 2:
                raise GeneratorSpecError(f"dictionary_sizes.{topic}", "need at least 2 terms per topic")
        for name in ("topic_post_shares", "user_topic_shares"):
            shares = getattr(self, name)
            if any(v < 0 for v in shares.values()) or sum(shares.values()) <= 0:
                raise GeneratorSpecError(name, "shares must be non-negative with a positive sum")
        for topic, mean in self.lifetime_means.items():
            if mean <= 0:
                raise GeneratorSpecError(f"lifetime_means.{topic}", "must be > 0")
        for topic, metrics in self.post_engagement.items():
            if set(metrics) != {"likes", "comments", "shares"}:
                raise GeneratorSpecError(f"post_engagement.{topic}", "needs likes, comments and shares")
        fractions = self.labeled_fraction + self.tie_fraction + self.empty_message_fraction
        if fractions > 1.0 + 1e-12:
            raise GeneratorSpecError(
                "labeled_fraction", f"labeled, tie and empty fractions sum to {fractions:.4f} > 1"
            )
        if len(self.pom_intercepts) != len(topics) - 1:
            raise GeneratorSpecError(
                "pom_intercepts", f"need K-1 = {len(topics) - 1} intercepts for {len(topics)} topics"
            )
        if any(b <= a for a, b in zip(self.pom_intercepts, self.pom_intercepts[1:])):
            raise GeneratorSpecError("pom_intercepts", "must be strictly increasing")
        if self.n_topic_users > self.n_users:
            raise GeneratorSpecError("n_topic_users", f"exceeds n_users ({self.n_users})")
        if self.user_likes.x_min < len(topics):
            raise GeneratorSpecError("user_likes.x_min", f"must be >= number of topics ({len(topics)})")
        lo, hi = self.terms_per_post
        if not 3 <= lo <= hi:
            raise GeneratorSpecError("terms_per_post", "need 3 <= min <= max")
        if self.dictionary_sizes and lo > min(self.dictionary_sizes.values()):
            raise GeneratorSpecError("terms_per_post", "min exceeds the smallest topic dictionary")
        flo, fhi = self.filler_words
        if not 0 <= flo <= fhi:
            raise GeneratorSpecError("filler_words", "need 0 <= min <= max")


class GeneratorLedger(BaseModel):
    """Planted ground truth of one generated corpus."""
    seed: int
    spec: GeneratorSpec
    dictionary: Dict[str, str]
    post_topics: Dict[str, str]
    post_counts: Dict[str, int]
    polarized_users: Dict[str, str]
    polarized_counts: Dict[str, int]
    topics_liked: Dict[str, int]
    user_lifetimes: Dict[str, float]
    user_lifetime_topics: Dict[str, str]
    post_weight_laws: Dict[str, Dict[str, PowerLawParams]]
    pom_intercepts: List[float]
    pom_beta: float
    counts: Dict[str, int]

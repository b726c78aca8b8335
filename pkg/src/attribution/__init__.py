"""
Attribution Module - Topics, Polarized Users and Mobility

This module handles:
- Majority-rule post labeling from dictionary terms
- User profiles and the polarization rule
- Pearson matrix of per-topic liking activity
- Engagement summaries by number of topics liked
"""

from .labeling import (
    UNLABELED,
    label_counts,
    label_posts,
    labels_from_frame,
    labels_to_frame,
    majority_label,
    post_topic,
    topic_scores,
)
from .users import (
    DEFAULT_THRESHOLD,
    UserProfile,
    classify_users,
    eligible_users,
    polarization_table,
    polarized_share,
    polarized_topic,
    profiles_to_frame,
)
from .mobility import (
    MIN_LIKES,
    engagement_by_topic_count,
    like_matrix,
    mobility_observations,
    pearson_matrix,
    topic_correlations,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "MIN_LIKES",
    "UNLABELED",
    "UserProfile",
    "classify_users",
    "eligible_users",
    "engagement_by_topic_count",
    "label_counts",
    "label_posts",
    "labels_from_frame",
    "labels_to_frame",
    "like_matrix",
    "majority_label",
    "mobility_observations",
    "pearson_matrix",
    "polarization_table",
    "polarized_share",
    "polarized_topic",
    "post_topic",
    "profiles_to_frame",
    "topic_correlations",
    "topic_scores",
]

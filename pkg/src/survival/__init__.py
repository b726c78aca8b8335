"""
Survival Module - Lifetimes of Posts and Users

This module handles:
- Post and user lifetimes (first to last comment) with optional censoring
- Kaplan-Meier curves with Greenwood confidence bands
- Gehan-Wilcoxon and related weighted log-rank group comparisons
"""

from .lifetimes import LifetimeSample, lifetimes, lifetimes_by_topic
from .kaplan_meier import SurvivalCurve, kaplan_meier
from .gehan import GroupTestResult, gehan_wilcoxon

__all__ = [
    "GroupTestResult",
    "LifetimeSample",
    "SurvivalCurve",
    "gehan_wilcoxon",
    "kaplan_meier",
    "lifetimes",
    "lifetimes_by_topic",
]

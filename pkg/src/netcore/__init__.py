"""
Netcore Module - Co-occurrence Networks and Backbones

This module handles:
- Binary post-term incidence (bipartite structure)
- Term co-occurrence projection C = M Mᵀ
- Disparity-filter edge scores and backbone extraction
"""

from .network import BipartiteIncidence, TermNetwork, project_cooccurrence
from .disparity import (
    Backbone,
    backbone_sweep,
    directional_scores,
    disparity_pvalue_integral,
    disparity_scores,
    extract_backbone,
)

__all__ = [
    "Backbone",
    "BipartiteIncidence",
    "TermNetwork",
    "backbone_sweep",
    "directional_scores",
    "disparity_pvalue_integral",
    "disparity_scores",
    "extract_backbone",
    "project_cooccurrence",
]

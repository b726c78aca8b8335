"""
narrative-miner - Topic, Engagement and Persistence Analytics for Social Media Posts

This package mines a corpus of posts with likes and comments:
- Dictionary-driven document-term matrices and term co-occurrence networks
- Disparity-filter backbones and community detection on term graphs
- Majority-rule post topics, polarized users and topic mobility
- Power-law tail fits, Kaplan-Meier lifetimes and weighted log-rank tests
- Proportional odds regression of topic mobility on activity
- Seeded synthetic corpora with a ground-truth ledger
- A cached, checksummed pipeline behind the narrative-miner CLI
"""

__version__ = "0.1.0"
__author__ = "narrative-miner contributors"

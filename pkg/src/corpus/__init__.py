"""
Corpus Module - Post/Like/Comment Interaction Data

This module handles:
- Line-delimited post record validation (pydantic)
- Immutable post and corpus types with user/page indexes
- Corpus cache serialization
- Entity breakdown summaries
"""

from .models import (
    Corpus,
    CorpusSummary,
    EventRecord,
    Post,
    PostRecord,
    UserActivity,
)
from .ingest import dump_corpus, ingest, ingest_file, summarize

__all__ = [
    "Corpus",
    "CorpusSummary",
    "EventRecord",
    "Post",
    "PostRecord",
    "UserActivity",
    "dump_corpus",
    "ingest",
    "ingest_file",
    "summarize",
]

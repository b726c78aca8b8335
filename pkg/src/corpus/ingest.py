"""
Corpus Ingestion - Line-Delimited Post Records

Reads one JSON post record per line, validates it, sorts its events and
builds the user/page indexes. The normalized corpus can be written back in
the same format, which is what the CLI uses as its corpus cache.

Features:
- Per-line validation with the offending line number in every error
- Duplicate post_id rejection
- Exact entity tallies for the breakdown table
"""

import json
from pathlib import Path
from typing import IO, Iterable, List, Union

from loguru import logger
from pydantic import ValidationError

from ..errors import CorpusFormatError, DuplicatePostError
from .models import Corpus, CorpusSummary, Post, PostRecord

SUPPORTED_SCHEMA_VERSIONS = ("1",)
TIMESTAMP_FIELDS = ("created_at", "t")


def ingest(source: Iterable[str], schema_version: str = "1") -> Corpus:
    """
    Build a Corpus from line-delimited post records.

    Args:
        source: Iterable of text lines (an open file works)
        schema_version: Record format tag; only "1" is defined

    Returns:
        Corpus with all indexes built

    Raises:
        CorpusFormatError: malformed line, bad field or unparseable timestamp
        DuplicatePostError: a post_id appears twice
    """
    if str(schema_version) not in SUPPORTED_SCHEMA_VERSIONS:
        raise CorpusFormatError(f"unsupported schema version '{schema_version}'")

    posts: List[Post] = []
    seen = set()
    for line_number, line in enumerate(source, start=1):
        if not line.strip():
            continue
        record = _parse_line(line, line_number)
        if record.post_id in seen:
            raise DuplicatePostError(record.post_id, line_number)
        seen.add(record.post_id)
        posts.append(Post.from_record(record))

    corpus = Corpus.from_posts(posts)
    summary = summarize(corpus)
    logger.info(
        "Ingested {} posts ({} likes, {} comments, {} shares) from {} pages",
        summary.posts, summary.likes, summary.comments, summary.shares, summary.pages,
    )
    return corpus


def _parse_line(line: str, line_number: int) -> PostRecord:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorpusFormatError(f"malformed record: {e.msg}", line_number) from e
    if not isinstance(payload, dict):
        raise CorpusFormatError("record is not a JSON object", line_number)

    try:
        return PostRecord.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        if first["loc"] and first["loc"][-1] in TIMESTAMP_FIELDS:
            raise CorpusFormatError(
                f"timestamp not parseable at '{loc}': {first['msg']}", line_number
            ) from e
        raise CorpusFormatError(f"invalid field '{loc}': {first['msg']}", line_number) from e


def ingest_file(path: Union[str, Path], schema_version: str = "1") -> Corpus:
    """Ingest a corpus file from disk."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return ingest(f, schema_version)


def dump_corpus(corpus: Corpus, sink: IO[str]) -> int:
    """
    Write the corpus back as line-delimited records, events sorted.

    Returns:
        Number of records written
    """
    count = 0
    for post in corpus.posts.values():
        record = post.to_record()
        payload = record.model_dump(exclude_none=True)
        sink.write(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n")
        count += 1
    return count


def summarize(corpus: Corpus) -> CorpusSummary:
    """Exact tallies of pages, posts, events and distinct acting users."""
    likes = comments = shares = 0
    likers = set()
    commenters = set()
    for post in corpus.posts.values():
        likes += len(post.like_events)
        comments += len(post.comment_events)
        shares += post.share_count
        likers.update(u for u, _ in post.like_events)
        commenters.update(u for u, _ in post.comment_events)

    return CorpusSummary(
        pages=len(corpus.page_index),
        posts=len(corpus.posts),
        likes=likes,
        comments=comments,
        shares=shares,
        likers=len(likers),
        commenters=len(commenters),
    )

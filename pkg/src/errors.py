"""
Error types raised across the narrative-miner pipeline.

Every domain failure derives from NarrativeMinerError, itself a ValueError,
so callers can catch the specific condition or treat it as bad input.
"""

from typing import Optional


class NarrativeMinerError(ValueError):
    """Base class for all domain errors."""


# =============================================================================
# CORPUS
# =============================================================================

class CorpusFormatError(NarrativeMinerError):
    """A corpus record could not be parsed or validated."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DuplicatePostError(NarrativeMinerError):
    """Two records share the same post_id."""

    def __init__(self, post_id: str, line_number: Optional[int] = None):
        self.post_id = post_id
        self.line_number = line_number
        where = f" (line {line_number})" if line_number is not None else ""
        super().__init__(f"duplicate post_id '{post_id}'{where}")


# =============================================================================
# LEXICON
# =============================================================================

class EmptyDocumentSetError(NarrativeMinerError):
    def __init__(self, message: str = "empty document set"):
        super().__init__(message)


class EmptyVocabularyError(NarrativeMinerError):
    """No term survives the occurrence threshold."""


class DictionaryError(NarrativeMinerError):
    """The term dictionary file is invalid."""


class DictionaryDisjointError(NarrativeMinerError):
    def __init__(self, message: str = "dictionary disjoint from corpus vocabulary"):
        super().__init__(message)


# =============================================================================
# COMMUNITY
# =============================================================================

class EmptyGraphError(NarrativeMinerError):
    def __init__(self, message: str = "empty graph"):
        super().__init__(message)


class NodeSetMismatchError(NarrativeMinerError):
    """Two partitions do not cover the same nodes."""


# =============================================================================
# STATISTICS
# =============================================================================

class DegenerateSampleError(NarrativeMinerError):
    def __init__(self, message: str = "degenerate sample"):
        super().__init__(message)


class EmptyScopeError(NarrativeMinerError):
    """No unit falls inside the requested lifetime scope."""


class NoEventsError(NarrativeMinerError):
    def __init__(self, group: str):
        self.group = group
        super().__init__(f"no events in group '{group}'")


class MissingCategoryError(NarrativeMinerError):
    """An ordinal category has no observation."""


class DivergentEstimateError(NarrativeMinerError):
    def __init__(self, detail: str = ""):
        message = "divergent estimate"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


# =============================================================================
# GENERATOR / PIPELINE
# =============================================================================

class GeneratorSpecError(NarrativeMinerError):
    """A synthetic generator spec is invalid; names the field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class StageError(NarrativeMinerError):
    """A pipeline stage failed."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {type(cause).__name__}: {cause}")

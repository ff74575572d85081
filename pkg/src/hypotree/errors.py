"""Exception hierarchy shared across the package.

Every error raised by library code derives from HypotreeError so callers
(service layer, CLI) can map failures to HTTP statuses / exit codes in one
place. Errors carry structured attributes rather than formatted strings
where a caller needs to branch on them.
"""

from __future__ import annotations


class HypotreeError(Exception):
    """Base class for all package errors."""


# --- tree / model errors ---------------------------------------------------


class UnknownNode(HypotreeError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node: {node_id}")


class EmptyDrafts(HypotreeError):
    def __init__(self) -> None:
        super().__init__("no drafts supplied")


class RootNotBookmarkable(HypotreeError):
    def __init__(self) -> None:
        super().__init__("the intent node cannot be bookmarked")


# --- ingest errors ---------------------------------------------------------


class IngestError(HypotreeError):
    """Base for dataset ingestion failures."""


class EmptyFile(IngestError):
    def __init__(self, detail: str = "no data rows"):
        super().__init__(detail)


class RaggedRows(IngestError):
    def __init__(self, row_number: int, expected: int, got: int):
        self.row_number = row_number
        self.expected = expected
        self.got = got
        super().__init__(
            f"row {row_number} has {got} fields, expected {expected}"
        )


class DuplicateHeader(IngestError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate column name: {name!r}")


# --- generation errors -----------------------------------------------------


class GenerationError(HypotreeError):
    """Base for prompt/provider/parse failures."""


class RootNotBranchablePromptless(GenerationError):
    def __init__(self) -> None:
        super().__init__(
            "the root node has no hypothesis to branch from; "
            "use the initial-generation prompt instead"
        )


class MalformedResponse(GenerationError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"malformed provider response: {detail}")


class WrongCardinality(GenerationError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected {expected} hypotheses, got {actual}")


class ProviderUnavailable(GenerationError):
    def __init__(self, detail: str):
        super().__init__(f"provider unavailable: {detail}")


class AuthMissing(GenerationError):
    def __init__(self, env_name: str):
        self.env_name = env_name
        super().__init__(f"environment variable {env_name} is not set")


class ProviderTimeout(GenerationError):
    def __init__(self, detail: str):
        super().__init__(f"provider timed out: {detail}")


# --- layout errors ---------------------------------------------------------


class LevelOverflow(HypotreeError):
    def __init__(self, level: int, required_width: float, viewport_width: float):
        self.level = level
        self.required_width = required_width
        self.viewport_width = viewport_width
        super().__init__(
            f"level {level} needs {required_width}px but the viewport is "
            f"{viewport_width}px wide"
        )


# --- hint errors -----------------------------------------------------------


class HintError(HypotreeError):
    """Base for chart/retrieval failures."""


class NoMappableColumns(HintError):
    def __init__(self, detail: str = "no dataset column matches the idea"):
        super().__init__(detail)


class SpecDatasetMismatch(HintError):
    def __init__(self, detail: str):
        super().__init__(detail)


class RetrieverUnavailable(HintError):
    def __init__(self, detail: str):
        super().__init__(f"retriever unavailable: {detail}")


# --- analytics / persistence errors ----------------------------------------


class CorruptLog(HypotreeError):
    def __init__(self, detail: str, event_id: int | None = None):
        self.event_id = event_id
        self.detail = detail
        super().__init__(
            detail if event_id is None else f"event {event_id}: {detail}"
        )


class SequenceGap(HypotreeError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"expected event_id {expected}, got {got}")


class UnknownSession(HypotreeError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id}")


class StorageFull(HypotreeError):
    def __init__(self, detail: str):
        super().__init__(f"storage full: {detail}")


class PermissionDenied(HypotreeError):
    def __init__(self, detail: str):
        super().__init__(f"permission denied: {detail}")


class BusySession(HypotreeError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"a generation is already in flight for session {session_id}")

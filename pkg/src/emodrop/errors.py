"""Exception vocabulary shared by the engine, stores, and the HTTP gateway.

Errors that can cross the wire carry a stable ``code`` and a ``retryable``
flag; the gateway serializes them verbatim. Everything else is internal.
"""

from __future__ import annotations


class EmodropError(Exception):
    """Base class for all errors raised by this package."""

    code = "backend_error"
    retryable = False


class ConfigError(EmodropError):
    """A config file or label string could not be parsed."""


class InvalidScoresError(EmodropError):
    """A raw score vector cannot be normalized (negative or all-zero)."""


class InvalidImageError(EmodropError):
    code = "invalid_image"


class NoFaceError(EmodropError):
    """No face found in a frame. Retryable: the client should recapture."""

    code = "no_face"
    retryable = True

    def __init__(self, message: str = "no face detected", emotion: str | None = None):
        super().__init__(message)
        self.emotion = emotion


class BackendLoadError(EmodropError):
    """Weight file missing or corrupt; ``offset`` is the first bad byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class RateLimitedError(EmodropError):
    code = "rate_limited"
    retryable = True


class SessionOverError(EmodropError):
    code = "session_over"


class UnknownSessionError(SessionOverError):
    """No live session with the given id."""


class UnregisteredPlayerError(EmodropError):
    code = "unregistered_player"


class IncompleteRegistrationError(EmodropError):
    code = "incomplete_registration"

    def __init__(self, missing: list[str]):
        super().__init__("missing emotion templates: " + ", ".join(missing))
        self.missing = list(missing)


class IllegalStateError(EmodropError):
    """An engine operation was called in a state that forbids it."""


class StoreError(EmodropError):
    """Dataset store I/O failure."""


class ManifestParseError(StoreError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"manifest line {line_number}: {message}")
        self.line_number = line_number


class DanglingRecordError(StoreError):
    def __init__(self, record_id: str, path: str):
        super().__init__(f"record {record_id}: image file missing at {path}")
        self.record_id = record_id


class EmptyDatasetError(EmodropError):
    """Evaluation was asked to run on a dataset with no samples."""


class IncompleteStudyError(EmodropError):
    """A (player, engine) group in a study file has no rounds."""

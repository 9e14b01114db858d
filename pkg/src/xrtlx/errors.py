"""Error taxonomy shared by the library, the HTTP service and the CLI.

Every error carries a stable ``code`` that the service maps onto an HTTP
status and the CLI maps onto an exit code.
"""

from __future__ import annotations


class TlxError(Exception):
    """Base class for all toolkit errors."""

    code = "internal"

    def __init__(self, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or []


class ValidationError(TlxError):
    """Input violates a documented invariant or schema rule."""

    code = "validation"


class InvalidModeError(ValidationError):
    """Weighting mode is incompatible with the dimension-set variant."""


class InconsistentWeightsError(ValidationError):
    """Weight vector does not sum to the pair count of its group."""


class ParseError(ValidationError):
    """Malformed wire text; carries the byte offset of the failure."""

    def __init__(self, message: str, byte_offset: int | None = None,
                 details: list[str] | None = None):
        super().__init__(message, details)
        self.byte_offset = byte_offset


class NotFoundError(TlxError):
    """Referenced study or session does not exist."""

    code = "not_found"


class EmptySessionError(NotFoundError):
    """Metrics requested for a session with no recorded events."""

    def __init__(self, message: str = "no events"):
        super().__init__(message)


class ConflictError(TlxError):
    """Resubmission differs from the already-persisted payload."""

    code = "conflict"


class StateError(TlxError):
    """Operation attempted out of order in the session state machine."""

    code = "state"


class StorageError(TlxError):
    """Underlying filesystem failure; message includes the path."""

    code = "internal"

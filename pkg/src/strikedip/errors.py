"""Exception hierarchy shared across the package."""


class StrikeDipError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(StrikeDipError, ValueError):
    """A parameter or input violates a documented precondition."""


class ValidationError(StrikeDipError, ValueError):
    """A record loaded from disk fails its invariants."""


class ParseError(StrikeDipError, ValueError):
    """A file is malformed or truncated."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class SchemaError(StrikeDipError, ValueError):
    """A file parses but lacks required fields."""


class DegenerateGeometryError(StrikeDipError, ValueError):
    """Input geometry is too degenerate for the requested fit."""


class EmptyCloudError(DegenerateGeometryError):
    """A stage received a point cloud with no points."""


class StageError(StrikeDipError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause

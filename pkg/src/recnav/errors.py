"""Exception types shared across the toolkit."""


class RecnavError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(RecnavError, ValueError):
    """A parameter violates an operation's contract."""


class IngestError(RecnavError, ValueError):
    """An input file is malformed; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(RecnavError, ValueError):
    """A file exists but does not match the expected schema."""


class MissingInputError(RecnavError, FileNotFoundError):
    """A required input file or argument is absent."""

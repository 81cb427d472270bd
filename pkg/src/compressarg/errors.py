"""Exception types shared across the package."""


class DecodeError(ValueError):
    """Bits do not decode to a valid symbol sequence under the given model."""


class ParseError(ValueError):
    """Malformed input text. ``line`` is 1-based, or None when not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IntegrityError(RuntimeError):
    """A trace or record is internally inconsistent.

    Raised only when the producer and the consumer of a trace disagree,
    which means there is a bug somewhere.
    """


class GuardError(ValueError):
    """An exhaustive computation was requested beyond its size guard."""

"""Shared exception types."""


class DiscrimPowerError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DiscrimPowerError):
    """A malformed input line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(DiscrimPowerError):
    """Structurally valid input that violates a data invariant."""


class ConfigurationError(DiscrimPowerError):
    """Inconsistent or unusable configuration / input combination."""

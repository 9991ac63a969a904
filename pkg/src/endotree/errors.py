"""Shared exception types."""


class EndotreeError(Exception):
    """Base class for all library errors."""


class DomainError(EndotreeError):
    """Input violates a documented precondition or domain restriction."""


class PrecisionError(DomainError):
    """An operation would expose digits beyond the tracked precision."""


class ExprSyntaxError(DomainError):
    """Malformed element expression; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position

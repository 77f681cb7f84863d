"""Exception hierarchy shared by all modules.

Every error is a :class:`ValueError` subclass so callers that only care about
"bad input" can catch one type.
"""


class SeqmonError(ValueError):
    """Base class for all package errors."""


class DomainError(SeqmonError):
    """A parameter lies outside the mathematical domain of a formula."""


class PreconditionError(SeqmonError):
    """A bound was evaluated outside the time range on which it is valid."""


class ConfigurationError(SeqmonError):
    """Invalid or contradictory configuration (also raised for usage errors)."""


class DataError(SeqmonError):
    """Malformed input data.

    ``position`` is the stream position or file line the problem was found at,
    when known.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
        self.position = position

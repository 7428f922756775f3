"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class MatchingError(Exception):
    """Base class for all errors raised by welfare_matching."""


class ProfileError(MatchingError, ValueError):
    """The utility data does not describe a valid market."""


class DimensionMismatchError(ProfileError):
    pass


class NegativeUtilityError(ProfileError):
    pass


class TiedUtilitiesError(ProfileError):
    pass


class NonFiniteError(ProfileError):
    pass


class OracleTooLargeError(MatchingError, ValueError):
    pass


class PreconditionViolatedError(MatchingError, ValueError):
    pass


class UnstableMatchingError(MatchingError, ValueError):
    pass


class RotationNotExposedError(MatchingError, ValueError):
    pass


class InternalInvariantBrokenError(MatchingError, RuntimeError):
    """A walk or solver reached a state that theory says is impossible."""


class CyclicGraphError(MatchingError, ValueError):
    pass


class HorizonTooSmallError(MatchingError, ValueError):
    pass


class TruthMismatchError(MatchingError, ValueError):
    pass


class InvalidGapError(MatchingError, ValueError):
    pass


class InvalidAlphaError(MatchingError, ValueError):
    pass


class ParseError(MatchingError, ValueError):
    """Malformed instance file; carries the offending location."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field

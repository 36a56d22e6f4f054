"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class MupackError(Exception):
    """Base class for all errors raised by mupack."""


class InvalidInstance(MupackError, ValueError):
    """Matrix or capacity data violates the packing-instance invariants."""


class AllZeroMatrix(MupackError):
    """Width is undefined because the constraint matrix has no positive entry."""


class EmptyGroundSet(MupackError):
    """Every column was eliminated during canonicalization."""


class NotBinary(MupackError):
    """A binary-only solver received a matrix with entries outside {0, 1}."""


class InvalidLambda(MupackError, ValueError):
    """Update factor must be strictly greater than 1."""


class WidthConditionViolated(MupackError):
    """The large-width preset was requested on an instance that is too narrow."""


class GroundSetTooLarge(MupackError):
    """Exhaustive enumeration was requested for too many elements."""


class InvalidSpec(MupackError, ValueError):
    """A generator specification is malformed or out of range."""


class InstanceFormatError(MupackError, ValueError):
    """An instance file does not follow the documented grammar."""

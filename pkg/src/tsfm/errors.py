"""Exception hierarchy.

Everything raised by this package derives from TsfmError so callers
(notably the CLI) can catch one base class.
"""

from __future__ import annotations


class TsfmError(Exception):
    """Base class for all package errors."""


class EmptySeries(TsfmError):
    """Series has no values."""


class UnsupportedFrequency(TsfmError):
    """Frequency unit or code is not recognized."""


class ContextTooShort(TsfmError):
    """Fewer than 3 non-missing values remain in the context."""


class AllMissing(TsfmError):
    """Every training target is missing."""


class NonPositivePeriod(TsfmError):
    """Cyclic encoding requires a strictly positive period."""


class ConfigEmpty(TsfmError):
    """Feature configuration enables no feature block."""


class TooShort(TsfmError):
    """Input vector is too short for the operation."""


class TooFewRows(TsfmError):
    """Not enough training rows for the regressor."""


class ShapeMismatch(TsfmError):
    """Operands have incompatible shapes or quantile grids."""


class MissingMedianLevel(TsfmError):
    """Median point forecast requested but level 0.5 is absent."""


class BackendFailure(TsfmError):
    """External regressor endpoint unreachable or returned an invalid response."""


class HistoryTooShort(TsfmError):
    """History shorter than the seasonal lag."""


class EmptyRecordSet(TsfmError):
    """Aggregation or benchmark invoked with no records."""


class ParseError(TsfmError):
    """Dataset file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GridViolation(TsfmError):
    """Series timestamps do not form a uniform grid."""

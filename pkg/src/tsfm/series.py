"""Canonical time-series and forecast-task representations.

Timestamps are never stored per row: a series holds (start, freq) and the
timestamp of step t is computed by calendar arithmetic, so the grid cannot
drift out of sync with the data. All timestamps are naive datetimes
interpreted as UTC, at second resolution.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from .errors import ContextTooShort, EmptySeries, UnsupportedFrequency

# unit -> (kind, size); seconds-based units advance by a fixed timedelta,
# month-based units advance by calendar months with day-of-month clamping.
_UNIT_TABLE: dict[str, tuple[str, int]] = {
    "second": ("seconds", 1),
    "minute": ("seconds", 60),
    "hour": ("seconds", 3600),
    "day": ("seconds", 86400),
    "week": ("seconds", 604800),
    "month": ("months", 1),
    "quarter": ("months", 3),
    "year": ("months", 12),
}

# Short codes used by dataset files and the CLI.
_FREQ_CODES: dict[str, str] = {
    "S": "second",
    "T": "minute",
    "MIN": "minute",
    "H": "hour",
    "D": "day",
    "W": "week",
    "M": "month",
    "Q": "quarter",
    "A": "year",
    "Y": "year",
}


def add_months(ts: datetime, months: int) -> datetime:
    """Advance a timestamp by calendar months, clamping the day of month.

    31 Jan + 1 month = 29 Feb in leap years (28 otherwise).
    """
    total = ts.year * 12 + (ts.month - 1) + months
    year, month = divmod(total, 12)
    month += 1
    day = min(ts.day, calendar.monthrange(year, month)[1])
    return ts.replace(year=year, month=month, day=day)


@dataclass(frozen=True)
class Frequency:
    """Sampling frequency: a unit and a positive integer multiplier."""

    unit: str
    multiplier: int = 1

    def __post_init__(self) -> None:
        if self.unit not in _UNIT_TABLE:
            raise UnsupportedFrequency(f"unknown frequency unit {self.unit!r}")
        if not isinstance(self.multiplier, int) or self.multiplier < 1:
            raise UnsupportedFrequency(
                f"multiplier must be a positive integer, got {self.multiplier!r}"
            )

    @classmethod
    def parse(cls, code: str) -> Frequency:
        """Parse a short code like 'H', 'D', '15T', 'min', 'Q'."""
        text = code.strip()
        i = 0
        while i < len(text) and text[i].isdigit():
            i += 1
        mult = int(text[:i]) if i else 1
        unit_code = text[i:].upper()
        if unit_code not in _FREQ_CODES:
            raise UnsupportedFrequency(f"unknown frequency code {code!r}")
        return cls(_FREQ_CODES[unit_code], mult)

    @property
    def code(self) -> str:
        canonical = {"second": "S", "minute": "T", "hour": "H", "day": "D",
                     "week": "W", "month": "M", "quarter": "Q", "year": "Y"}
        prefix = str(self.multiplier) if self.multiplier != 1 else ""
        return prefix + canonical[self.unit]

    def advance(self, start: datetime, steps: int) -> datetime:
        """Timestamp `steps` grid steps after `start`.

        Always computed from `start` directly (not by repeated addition), so
        month-like steps do not drift after a clamped month end.
        """
        kind, size = _UNIT_TABLE[self.unit]
        n = size * self.multiplier * steps
        if kind == "seconds":
            return start + timedelta(seconds=n)
        return add_months(start, n)


@dataclass(frozen=True)
class TimeSeries:
    """Uniform-grid univariate series. NaN marks a missing value."""

    id: str
    start: datetime
    freq: Frequency
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n_observed(self) -> int:
        return int(np.isfinite(self.values).sum())

    def timestamp(self, step: int) -> datetime:
        return self.freq.advance(self.start, step)

    def timestamps(self) -> list[datetime]:
        return [self.timestamp(i) for i in range(len(self))]


def validate_grid(series: TimeSeries) -> TimeSeries:
    """Check that a series is non-empty and its grid is well defined.

    Identity on valid input; raises otherwise.
    """
    if len(series) == 0:
        raise EmptySeries(f"series {series.id!r} has no values")
    if series.freq.unit not in _UNIT_TABLE or series.freq.multiplier < 1:
        raise UnsupportedFrequency(f"series {series.id!r}: bad frequency {series.freq}")
    return series


@dataclass(frozen=True)
class ForecastTask:
    """A series plus the forecasting contract applied to it."""

    series: TimeSeries
    horizon: int
    max_context: int = 4096
    seasonality_m: int = 1

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.max_context < 1:
            raise ValueError(f"max_context must be >= 1, got {self.max_context}")
        if self.seasonality_m < 1:
            raise ValueError(f"seasonality_m must be >= 1, got {self.seasonality_m}")


def split_context_horizon(task: ForecastTask) -> tuple[TimeSeries, list[datetime]]:
    """Truncate to the trailing context window and lay out future timestamps.

    The context keeps the last min(len, max_context) steps with missing
    values retained in place; the horizon is the next `task.horizon` grid
    continuations after the final context step.
    """
    series = validate_grid(task.series)
    n = len(series)
    ctx_len = min(n, task.max_context)
    offset = n - ctx_len
    context = TimeSeries(
        id=series.id,
        start=series.timestamp(offset),
        freq=series.freq,
        values=series.values[offset:],
    )
    if context.n_observed < 3:
        raise ContextTooShort(
            f"series {series.id!r}: {context.n_observed} non-missing values in context"
        )
    future = [series.timestamp(n + h) for h in range(task.horizon)]
    return context, future

"""Feature engineering: calendar encodings, seasonal pairs, running index.

The full feature matrix is the concatenation [calendar | seasonal | index],
with blocks omitted when disabled. With defaults (8 cyclic calendar
components + year, k=5 seasonal pairs, index) a row has 17 + 10 + 1 = 28
columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .errors import AllMissing, ConfigEmpty, NonPositivePeriod
from .seasonal import SeasonalitySet, seasonal_feature_block
from .series import TimeSeries

# (component name, period). Positions are zero-based so that position 0
# always encodes to (1, 0). Monday = 0 for day_of_week, January = 0 for
# month_of_year; week_of_year uses the ISO week number.
CALENDAR_COMPONENTS: tuple[tuple[str, float], ...] = (
    ("second_of_minute", 60.0),
    ("minute_of_hour", 60.0),
    ("hour_of_day", 24.0),
    ("day_of_week", 7.0),
    ("day_of_month", 31.0),
    ("day_of_year", 366.0),
    ("week_of_year", 53.0),
    ("month_of_year", 12.0),
)

N_CALENDAR_FEATURES = 2 * len(CALENDAR_COMPONENTS) + 1  # cyclic pairs + year


@dataclass(frozen=True)
class FeatureMatrix:
    """Named feature columns over n rows."""

    column_names: tuple[str, ...]
    rows: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D array")
        if rows.shape[1] != len(self.column_names):
            raise ValueError(
                f"{len(self.column_names)} column names for {rows.shape[1]} columns"
            )
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_cols(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class TabularSplit:
    """Train/test feature matrices with aligned training targets.

    y_train may still contain NaN before drop_missing_rows; afterwards it is
    fully observed.
    """

    x_train: FeatureMatrix
    y_train: np.ndarray
    x_test: FeatureMatrix

    def __post_init__(self) -> None:
        y = np.asarray(self.y_train, dtype=np.float64)
        y.flags.writeable = False
        object.__setattr__(self, "y_train", y)
        if self.x_train.n_rows != len(y):
            raise ValueError(
                f"{self.x_train.n_rows} training rows but {len(y)} targets"
            )
        if self.x_train.n_cols != self.x_test.n_cols:
            raise ValueError("x_train and x_test column counts differ")


@dataclass(frozen=True)
class FeatureConfig:
    """Which feature blocks to build."""

    use_calendar: bool = True
    use_seasonal: bool = True
    use_index: bool = True
    k_seasonal: int = 5

    def __post_init__(self) -> None:
        if not (self.use_calendar or self.use_seasonal or self.use_index):
            raise ConfigEmpty("at least one feature block must be enabled")
        if self.k_seasonal < 0:
            raise ValueError(f"k_seasonal must be >= 0, got {self.k_seasonal}")

    @classmethod
    def from_names(cls, names: str, k_seasonal: int = 5) -> FeatureConfig:
        """Build from a comma-separated list like 'calendar,seasonal,index'."""
        parts = {p.strip() for p in names.split(",") if p.strip()}
        known = {"calendar", "seasonal", "index"}
        unknown = parts - known
        if unknown:
            raise ValueError(f"unknown feature names: {sorted(unknown)}")
        return cls(
            use_calendar="calendar" in parts,
            use_seasonal="seasonal" in parts,
            use_index="index" in parts,
            k_seasonal=k_seasonal,
        )

    def n_columns(self) -> int:
        n = 0
        if self.use_calendar:
            n += N_CALENDAR_FEATURES
        if self.use_seasonal:
            n += 2 * self.k_seasonal
        if self.use_index:
            n += 1
        return n


def cyclic_encode(position: float, period: float) -> tuple[float, float]:
    """(cos, sin) of a position on a cycle of the given period."""
    if period <= 0:
        raise NonPositivePeriod(f"period must be positive, got {period}")
    angle = 2.0 * math.pi * position / period
    return math.cos(angle), math.sin(angle)


def _calendar_positions(ts: datetime) -> tuple[float, ...]:
    return (
        float(ts.second),
        float(ts.minute),
        float(ts.hour),
        float(ts.weekday()),
        float(ts.day - 1),
        float(ts.timetuple().tm_yday - 1),
        float(ts.isocalendar()[1] - 1),
        float(ts.month - 1),
    )


def calendar_features(ts: datetime) -> np.ndarray:
    """17 calendar features: 8 (cos, sin) pairs followed by the year.

    The year is passed through unnormalized.
    """
    out = np.empty(N_CALENDAR_FEATURES)
    positions = _calendar_positions(ts)
    for i, (pos, (_, period)) in enumerate(zip(positions, CALENDAR_COMPONENTS)):
        out[2 * i], out[2 * i + 1] = cyclic_encode(pos, period)
    out[-1] = float(ts.year)
    return out


def calendar_feature_names() -> list[str]:
    names: list[str] = []
    for name, _ in CALENDAR_COMPONENTS:
        names += [f"{name}_cos", f"{name}_sin"]
    names.append("year")
    return names


def running_index(n: int) -> np.ndarray:
    """[0, 1, ..., n-1] as floats. Test rows continue the count."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.arange(n, dtype=np.float64)


def assemble_features(
    context: TimeSeries,
    future_stamps: list[datetime],
    seasonalities: SeasonalitySet | None,
    config: FeatureConfig,
) -> TabularSplit:
    """Build the [calendar | seasonal | index] split for a context + horizon.

    The seasonal block is evaluated on the running index, which continues
    across the train/test boundary. y_train is the raw context (NaN where
    missing); callers drop missing rows before regression.
    """
    if not (config.use_calendar or config.use_seasonal or config.use_index):
        raise ConfigEmpty("at least one feature block must be enabled")
    if config.use_seasonal and seasonalities is None:
        raise ValueError("seasonal features enabled but no seasonalities given")

    n_train = len(context)
    n_test = len(future_stamps)
    idx_train = running_index(n_train)
    idx_test = np.arange(n_train, n_train + n_test, dtype=np.float64)

    names: list[str] = []
    train_blocks: list[np.ndarray] = []
    test_blocks: list[np.ndarray] = []

    if config.use_calendar:
        stamps_train = context.timestamps()
        train_blocks.append(np.stack([calendar_features(t) for t in stamps_train]))
        test_blocks.append(np.stack([calendar_features(t) for t in future_stamps]))
        names += calendar_feature_names()
    if config.use_seasonal:
        assert seasonalities is not None
        train_blocks.append(
            seasonal_feature_block(seasonalities, idx_train, config.k_seasonal)
        )
        test_blocks.append(
            seasonal_feature_block(seasonalities, idx_test, config.k_seasonal)
        )
        for i in range(config.k_seasonal):
            names += [f"seasonal_{i + 1}_cos", f"seasonal_{i + 1}_sin"]
    if config.use_index:
        train_blocks.append(idx_train[:, None])
        test_blocks.append(idx_test[:, None])
        names.append("index")

    x_train = FeatureMatrix(tuple(names), np.concatenate(train_blocks, axis=1))
    x_test = FeatureMatrix(tuple(names), np.concatenate(test_blocks, axis=1))
    return TabularSplit(x_train=x_train, y_train=context.values, x_test=x_test)


def drop_missing_rows(split: TabularSplit, y_raw: np.ndarray | None = None) -> TabularSplit:
    """Remove training rows whose target is missing; x_test is untouched.

    Retained rows keep their relative order.
    """
    y = split.y_train if y_raw is None else np.asarray(y_raw, dtype=np.float64)
    if len(y) != split.x_train.n_rows:
        raise ValueError("y_raw is not aligned with x_train rows")
    keep = np.isfinite(y)
    if not keep.any():
        raise AllMissing("every training target is missing")
    if keep.all():
        return TabularSplit(split.x_train, y, split.x_test)
    x_kept = FeatureMatrix(split.x_train.column_names, split.x_train.rows[keep])
    return TabularSplit(x_kept, y[keep], split.x_test)

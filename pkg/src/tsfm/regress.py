"""Probabilistic regression backends and the forecasting pipeline.

A backend maps a tabular split to a quantile prediction on a fixed level
grid. Built-ins: a seasonal-naive baseline (degenerate distribution) and a
k-nearest-neighbor quantile regressor that stands in for a pretrained
tabular model; an external HTTP endpoint can be attached through the
adapter in tsfm.external.

The pipeline runs two branches over the same features, one on z-normalized
targets and one on power-transformed targets, and averages their quantile
curves level-wise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

import numpy as np

from .errors import (
    MissingMedianLevel,
    ShapeMismatch,
    TooFewRows,
)
from .features import FeatureConfig, TabularSplit, assemble_features, drop_missing_rows
from .seasonal import SeasonalitySet, detect_seasonalities
from .series import ForecastTask, Frequency, TimeSeries, split_context_horizon
from .transforms import power_transform, z_normalize

# Internal level grid: 0.05 .. 0.95 in steps of 0.05. Built from integer
# ratios so 0.5 is exactly representable.
DEFAULT_LEVELS: tuple[float, ...] = tuple(i / 20 for i in range(1, 20))
# Evaluation grid used by the benchmark metrics: 0.1 .. 0.9.
EVAL_LEVELS: tuple[float, ...] = tuple(i / 10 for i in range(1, 10))

REGRESSOR_KINDS = ("seasonal_naive", "knn", "external")

_ZERO_DISTANCE_EPS = 1e-9
_CONSTANT_EPS = 1e-12


@dataclass(frozen=True)
class QuantilePrediction:
    """Monotone quantile curves, one row per horizon step."""

    levels: tuple[float, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        levels = tuple(float(q) for q in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("levels must be non-empty")
        if any(not 0.0 < q < 1.0 for q in levels):
            raise ValueError("levels must lie in (0, 1)")
        if any(a >= b for a, b in zip(levels, levels[1:])):
            raise ValueError("levels must be strictly increasing")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(levels):
            raise ValueError(
                f"values must be (H x {len(levels)}), got {values.shape}"
            )
        if not np.isfinite(values).all():
            raise ValueError("quantile values must be finite")
        if (np.diff(values, axis=1) < 0).any():
            raise ValueError("quantile values must be non-decreasing per row")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def horizon(self) -> int:
        return self.values.shape[0]

    def level_column(self, level: float) -> np.ndarray:
        for i, q in enumerate(self.levels):
            if abs(q - level) < 1e-12:
                return self.values[:, i]
        raise KeyError(f"level {level} not on the grid")


def repair_monotone(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Sort each crossing row; returns (repaired values, number of rows touched)."""
    values = np.asarray(values, dtype=np.float64)
    crossing = (np.diff(values, axis=1) < 0).any(axis=1)
    n_repaired = int(crossing.sum())
    if n_repaired == 0:
        return values, 0
    repaired = values.copy()
    repaired[crossing] = np.sort(values[crossing], axis=1)
    return repaired, n_repaired


@dataclass(frozen=True)
class RegressorSpec:
    """Which backend to run, plus backend-specific parameters.

    external requires params["endpoint"]; params["timeout"] (seconds) and
    params["m"] (seasonal-naive lag) are optional.
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in REGRESSOR_KINDS:
            raise ValueError(f"unknown regressor kind {self.kind!r}")
        if self.kind == "external" and not self.params.get("endpoint"):
            raise ValueError("external regressor requires an endpoint URL")


def seasonal_naive_forecast(
    context: TimeSeries,
    horizon: int,
    m: int,
    levels: tuple[float, ...] = DEFAULT_LEVELS,
) -> QuantilePrediction:
    """Repeat the last observed season; all levels carry the point value.

    With fewer than m observations (or a missing seasonal reference) the
    last observed value is used instead.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    y = context.values
    n = len(y)
    observed = np.isfinite(y)
    if not observed.any():
        raise ValueError("seasonal naive needs at least one observed value")
    last_observed = float(y[np.nonzero(observed)[0][-1]])

    points = np.empty(horizon)
    for h in range(horizon):
        value = last_observed
        if n >= m:
            idx = n - m + (h % m)
            # walk back whole seasons until an observed value appears
            while idx >= 0 and not math.isfinite(y[idx]):
                idx -= m
            if idx >= 0:
                value = float(y[idx])
        points[h] = value
    values = np.repeat(points[:, None], len(levels), axis=1)
    return QuantilePrediction(levels=tuple(levels), values=values)


def _weighted_quantiles(
    targets: np.ndarray, weights: np.ndarray, levels: np.ndarray
) -> np.ndarray:
    """Step-function weighted empirical quantiles of a small sample."""
    order = np.argsort(targets, kind="stable")
    sorted_targets = targets[order]
    cumulative = np.cumsum(weights[order])
    cumulative /= cumulative[-1]
    positions = np.searchsorted(cumulative, levels, side="left")
    positions = np.minimum(positions, len(sorted_targets) - 1)
    return sorted_targets[positions]


def knn_quantile_fit_predict(
    split: TabularSplit, levels: tuple[float, ...] = DEFAULT_LEVELS
) -> QuantilePrediction:
    """Inverse-distance-weighted quantiles of the nearest training targets.

    Features are z-scored per column with training statistics; the neighbor
    count is max(3, ceil(sqrt(n_train))); distance ties break toward the
    lower row index. Deterministic: no RNG anywhere.
    """
    n_train = split.x_train.n_rows
    if n_train < 3:
        raise TooFewRows(f"knn needs at least 3 training rows, got {n_train}")
    x_train = split.x_train.rows
    x_test = split.x_test.rows
    y = split.y_train

    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    std = np.where(std < _CONSTANT_EPS, 1.0, std)
    a = (x_train - mean) / std
    b = (x_test - mean) / std

    k = max(3, math.ceil(math.sqrt(n_train)))
    k = min(k, n_train)
    level_arr = np.asarray(levels)
    out = np.empty((len(b), len(levels)))
    row_ids = np.arange(n_train)
    for i, row in enumerate(b):
        distances = np.sqrt(((a - row) ** 2).sum(axis=1))
        nearest = np.lexsort((row_ids, distances))[:k]
        weights = 1.0 / (distances[nearest] + _ZERO_DISTANCE_EPS)
        out[i] = _weighted_quantiles(y[nearest], weights, level_arr)
    return QuantilePrediction(levels=tuple(levels), values=out)


def fit_predict(
    regressor: RegressorSpec,
    split: TabularSplit,
    levels: tuple[float, ...] = DEFAULT_LEVELS,
) -> tuple[QuantilePrediction, int]:
    """Dispatch a split to the configured backend.

    Returns (prediction, number of rows whose quantiles needed monotonicity
    repair). Built-in backends are monotone by construction; external
    responses are repaired by per-row sorting.
    """
    if regressor.kind == "knn":
        return knn_quantile_fit_predict(split, levels), 0
    if regressor.kind == "seasonal_naive":
        horizon = split.x_test.n_rows
        m = int(regressor.params.get("m", 1))
        context = _series_from_targets(split.y_train)
        return seasonal_naive_forecast(context, horizon, m, levels), 0
    if regressor.kind == "external":
        from .external import external_fit_predict

        raw = external_fit_predict(
            endpoint=str(regressor.params["endpoint"]),
            split=split,
            levels=levels,
            timeout=float(regressor.params.get("timeout", 30.0)),
        )
        repaired, n_repaired = repair_monotone(raw)
        return QuantilePrediction(levels=tuple(levels), values=repaired), n_repaired
    raise ValueError(f"unknown regressor kind {regressor.kind!r}")


def _series_from_targets(y: np.ndarray) -> TimeSeries:
    # featureless carrier so the naive backend can reuse the series path
    return TimeSeries(
        id="y_train", start=datetime(2000, 1, 1), freq=Frequency("hour"), values=y
    )


def ensemble_quantiles(a: QuantilePrediction, b: QuantilePrediction) -> QuantilePrediction:
    """Level-wise arithmetic mean of two quantile curves (Vincentized)."""
    if a.levels != b.levels or a.values.shape != b.values.shape:
        raise ShapeMismatch("predictions must share levels and horizon")
    merged = 0.5 * (a.values + b.values)
    merged, _ = repair_monotone(merged)  # means of monotone rows stay monotone
    return QuantilePrediction(levels=a.levels, values=merged)


def point_forecast(pred: QuantilePrediction, mode: str = "median") -> np.ndarray:
    """Extract a point forecast: the median level, or the quantile-curve mean.

    The mean integrates the quantile function over the level grid with the
    trapezoid rule, normalized by the grid span.
    """
    if mode == "median":
        try:
            return pred.level_column(0.5).copy()
        except KeyError:
            raise MissingMedianLevel("level 0.5 is not on the prediction grid")
    if mode == "mean":
        levels = np.asarray(pred.levels)
        span = levels[-1] - levels[0]
        if span <= 0:
            return pred.values[:, 0].copy()
        return np.trapz(pred.values, levels, axis=1) / span
    raise ValueError(f"unknown point mode {mode!r}")


@dataclass(frozen=True)
class PipelineResult:
    """Prediction plus run bookkeeping for one task."""

    prediction: QuantilePrediction
    repairs: int = 0
    constant: bool = False
    seasonalities: SeasonalitySet | None = None


def run_pipeline(
    task: ForecastTask,
    config: FeatureConfig,
    regressor: RegressorSpec,
    levels: tuple[float, ...] = DEFAULT_LEVELS,
) -> PipelineResult:
    """Full forecast for one task.

    Truncate the context, detect seasonalities on it, assemble features,
    drop missing training rows, then run the backend once on z-normalized
    targets and once on power-transformed targets and average the two
    quantile curves. The seasonal-naive backend bypasses featurization and
    transforms entirely; constant training targets short-circuit to a
    degenerate prediction without invoking the backend.
    """
    context, future_stamps = split_context_horizon(task)

    if regressor.kind == "seasonal_naive":
        prediction = seasonal_naive_forecast(
            context, task.horizon, task.seasonality_m, levels
        )
        return PipelineResult(prediction=prediction)

    seasonalities: SeasonalitySet | None = None
    if config.use_seasonal:
        seasonalities = detect_seasonalities(context.values, config.k_seasonal)

    split = assemble_features(context, future_stamps, seasonalities, config)
    split = drop_missing_rows(split)

    y = split.y_train
    if float(y.max() - y.min()) < _CONSTANT_EPS:
        constant = float(y[0])
        values = np.full((task.horizon, len(levels)), constant)
        return PipelineResult(
            prediction=QuantilePrediction(levels=tuple(levels), values=values),
            constant=True,
            seasonalities=seasonalities,
        )

    repairs = 0
    branch_values: list[np.ndarray] = []
    for transform_fn in (z_normalize, power_transform):
        y_t, transform = transform_fn(y)
        branch_split = TabularSplit(split.x_train, y_t, split.x_test)
        pred, n_rep = fit_predict(regressor, branch_split, levels)
        repairs += n_rep
        branch_values.append(transform.invert(pred.values))

    merged = 0.5 * (branch_values[0] + branch_values[1])
    merged, n_rep = repair_monotone(merged)
    repairs += n_rep
    prediction = QuantilePrediction(levels=tuple(levels), values=merged)
    return PipelineResult(
        prediction=prediction, repairs=repairs, seasonalities=seasonalities
    )

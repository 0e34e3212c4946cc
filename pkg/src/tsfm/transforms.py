"""Target transforms: z-normalization and a Box-Cox power transform.

Both are invertible; the inverse is applied level-wise to quantile values,
which is exact because the transforms are monotone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooShort

_STD_FLOOR = 1e-12
# Profile-likelihood grid for the Box-Cox exponent: -2.0, -1.9, ..., 2.0.
LAMBDA_GRID: tuple[float, ...] = tuple(round(-2.0 + 0.1 * i, 10) for i in range(41))


@dataclass(frozen=True)
class TargetTransform:
    """Fitted forward/inverse map for training targets."""

    kind: str  # "znorm" | "power"
    mean: float
    std: float
    lam: float = 0.0
    shift: float = 0.0
    constant: bool = False

    def apply(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "znorm":
            return (y - self.mean) / self.std
        transformed = _boxcox(y + self.shift, self.lam)
        return (transformed - self.mean) / self.std

    def invert(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        raw = values * self.std + self.mean
        if self.kind == "znorm":
            return raw
        return _boxcox_inverse(raw, self.lam) - self.shift


def _boxcox(y: np.ndarray, lam: float) -> np.ndarray:
    if lam == 0.0:
        return np.log(y)
    return (np.power(y, lam) - 1.0) / lam


def _boxcox_inverse(z: np.ndarray, lam: float) -> np.ndarray:
    if lam == 0.0:
        return np.exp(z)
    # extrapolated quantiles can leave the transform's range; clamp the base
    base = np.maximum(lam * z + 1.0, _STD_FLOOR)
    return np.power(base, 1.0 / lam)


def z_normalize(y: np.ndarray) -> tuple[np.ndarray, TargetTransform]:
    """Center and scale by the sample mean and population std.

    A (near-)constant input gets std forced to 1 and the constant flag set.
    """
    y = np.asarray(y, dtype=np.float64)
    if len(y) < 1:
        raise TooShort("need at least 1 value")
    mean = float(y.mean())
    std = float(y.std())
    constant = std < _STD_FLOOR
    if constant:
        std = 1.0
    transform = TargetTransform(kind="znorm", mean=mean, std=std, constant=constant)
    return transform.apply(y), transform


def _boxcox_log_likelihood(y: np.ndarray, lam: float) -> float:
    """Profile log-likelihood of the Box-Cox exponent for positive data."""
    n = len(y)
    z = _boxcox(y, lam)
    var = float(z.var())
    if var < _STD_FLOOR:
        var = _STD_FLOOR
    return -0.5 * n * np.log(var) + (lam - 1.0) * float(np.log(y).sum())


def power_transform(y: np.ndarray) -> tuple[np.ndarray, TargetTransform]:
    """Box-Cox transform with the exponent chosen by grid profile likelihood.

    Non-positive inputs are first shifted by 1 - min(y) so the smallest value
    maps to 1. The transformed targets are then z-normalized.
    """
    y = np.asarray(y, dtype=np.float64)
    if len(y) < 2:
        raise TooShort(f"need at least 2 values, got {len(y)}")
    low = float(y.min())
    shift = 1.0 - low if low <= 0.0 else 0.0
    shifted = y + shift

    if float(shifted.std()) < _STD_FLOOR:
        # constant input: the exponent is meaningless, fall back to identity-ish
        transform = TargetTransform(
            kind="power", mean=float(_boxcox(shifted, 1.0).mean()), std=1.0,
            lam=1.0, shift=shift, constant=True,
        )
        return transform.apply(y), transform

    best_lam = max(LAMBDA_GRID, key=lambda lam: _boxcox_log_likelihood(shifted, lam))
    transformed = _boxcox(shifted, best_lam)
    mean = float(transformed.mean())
    std = float(transformed.std())
    if std < _STD_FLOOR:
        std = 1.0
    transform = TargetTransform(
        kind="power", mean=mean, std=std, lam=best_lam, shift=shift
    )
    return transform.apply(y), transform

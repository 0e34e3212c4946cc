"""Automatic seasonality extraction from the magnitude spectrum.

Pipeline: fill missing values by linear interpolation, remove a linear
trend, taper with a Hann window, zero-pad by a factor of two, take the
magnitude of the real DFT, and keep up to k strict local maxima ordered by
magnitude. Frequencies are in cycles per step, in (0, 0.5].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooShort


@dataclass(frozen=True)
class SeasonalitySet:
    """Top detected frequencies (cycles per step) with their magnitudes."""

    freqs: tuple[float, ...]
    magnitudes: tuple[float, ...]
    k_requested: int

    def __post_init__(self) -> None:
        if self.k_requested < 1:
            raise ValueError(f"k_requested must be >= 1, got {self.k_requested}")
        if len(self.freqs) != len(self.magnitudes):
            raise ValueError("freqs and magnitudes must align")
        if len(self.freqs) > self.k_requested:
            raise ValueError("more frequencies than requested")
        for f in self.freqs:
            if not 0.0 < f <= 0.5:
                raise ValueError(f"frequency {f} outside (0, 0.5]")
        mags = self.magnitudes
        if any(mags[i] < mags[i + 1] for i in range(len(mags) - 1)):
            raise ValueError("magnitudes must be non-increasing")

    def __len__(self) -> int:
        return len(self.freqs)

    @classmethod
    def empty(cls, k_requested: int) -> SeasonalitySet:
        return cls(freqs=(), magnitudes=(), k_requested=k_requested)


def detrend_linear(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Residual after ordinary least squares of y against its index.

    Returns (residual, slope, intercept).
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if n < 2:
        raise TooShort(f"need at least 2 points to detrend, got {n}")
    t = np.arange(n, dtype=np.float64)
    t_centered = t - t.mean()
    denom = float((t_centered**2).sum())
    slope = float((t_centered * (y - y.mean())).sum() / denom)
    intercept = float(y.mean() - slope * t.mean())
    residual = y - (slope * t + intercept)
    return residual, slope, intercept


def hann_window(n: int) -> np.ndarray:
    """Hann taper of length n; endpoints are 0, symmetric; [1] for n=1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return np.ones(1)
    j = np.arange(n, dtype=np.float64)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * j / (n - 1)))


def zero_pad(y: np.ndarray, factor: int = 2) -> np.ndarray:
    """Append zeros so the output is `factor` times the input length."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    y = np.asarray(y, dtype=np.float64)
    if factor == 1:
        return y.copy()
    return np.concatenate([y, np.zeros((factor - 1) * len(y))])


def _next_pow2(n: int) -> int:
    m = 1
    while m < n:
        m <<= 1
    return m


def _fft_radix2(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey FFT. len(x) must be a power of two."""
    n = len(x)
    levels = n.bit_length() - 1
    # bit-reversal permutation
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(levels):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    out = np.asarray(x, dtype=np.complex128)[rev]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(-1, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * twiddle
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        size *= 2
    return out


def real_dft_magnitude(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Magnitude spectrum of a real signal on the non-negative frequency bins.

    The input is zero-padded up to the next power of two before the FFT, and
    the frequency grid j/N is computed from that final padded length N.
    Returns (freqs, mags) for j = 0 .. N/2.
    """
    y = np.asarray(y, dtype=np.float64)
    if len(y) < 2:
        raise TooShort(f"need at least 2 points, got {len(y)}")
    n = _next_pow2(len(y))
    padded = np.concatenate([y, np.zeros(n - len(y))]) if n != len(y) else y
    spectrum = _fft_radix2(padded)
    half = n // 2
    freqs = np.arange(half + 1, dtype=np.float64) / n
    mags = np.abs(spectrum[: half + 1])
    return freqs, mags


def _fill_missing(y: np.ndarray) -> np.ndarray:
    """Linear interpolation over missing entries; edges take the nearest value."""
    y = np.asarray(y, dtype=np.float64)
    ok = np.isfinite(y)
    if ok.all():
        return y.copy()
    idx = np.arange(len(y), dtype=np.float64)
    return np.interp(idx, idx[ok], y[ok])


def detect_seasonalities(y: np.ndarray, k: int) -> SeasonalitySet:
    """Detect up to k dominant frequencies in a (possibly gappy) signal.

    Peaks are strict local maxima of the padded magnitude spectrum (bin 0
    excluded), taken in order of descending magnitude with ties broken
    toward lower frequency, and any candidate within one bin of an already
    selected peak is skipped. Fewer than 8 observed values yield an empty
    set. Returned frequencies are in cycles per original step.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    y = np.asarray(y, dtype=np.float64)
    if int(np.isfinite(y).sum()) < 8:
        return SeasonalitySet.empty(k)
    filled = _fill_missing(y)
    residual, _, _ = detrend_linear(filled)
    tapered = residual * hann_window(len(residual))
    padded = zero_pad(tapered, 2)
    freqs, mags = real_dft_magnitude(padded)

    interior = mags[1:-1]
    is_peak = (interior > mags[:-2]) & (interior >= mags[2:])
    candidates = np.nonzero(is_peak)[0] + 1
    # descending magnitude, ties toward the lower bin
    order = np.lexsort((candidates, -mags[candidates]))
    selected: list[int] = []
    for j in candidates[order]:
        if len(selected) >= k:
            break
        if all(abs(int(j) - s) > 1 for s in selected):
            selected.append(int(j))
    return SeasonalitySet(
        freqs=tuple(float(freqs[j]) for j in selected),
        magnitudes=tuple(float(mags[j]) for j in selected),
        k_requested=k,
    )


def seasonal_feature_block(
    seasonalities: SeasonalitySet, indices: np.ndarray, k_requested: int
) -> np.ndarray:
    """(cos, sin) pair per detected frequency, zero-padded to 2*k_requested columns.

    `indices` is the global running index of each row.
    """
    indices = np.asarray(indices, dtype=np.float64)
    block = np.zeros((len(indices), 2 * k_requested))
    for i, f in enumerate(seasonalities.freqs[:k_requested]):
        angle = 2.0 * np.pi * f * indices
        block[:, 2 * i] = np.cos(angle)
        block[:, 2 * i + 1] = np.sin(angle)
    return block

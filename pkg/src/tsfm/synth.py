"""Seeded synthetic signal generators.

All randomness flows through an in-tree xorshift64* generator so that the
same (spec, seed) produces bit-identical output on every platform,
independent of any library's RNG defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

import numpy as np

from .series import Frequency, TimeSeries

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_XORSHIFT_MULT = 0x2545F4914F6CDD1D

SYNTH_KINDS = (
    "noise",
    "linear_trend",
    "exp_trend",
    "seasonal",
    "additive_combo",
    "multiplicative_combo",
    "composite",
    "harmonic",
)

_DEFAULT_START = datetime(2021, 1, 4)  # a Monday, 00:00 UTC


def _splitmix64(x: int) -> int:
    x = (x + _SPLITMIX_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class Xorshift64Star:
    """Marsaglia xorshift64* with the standard multiplier.

    The raw seed passes through one splitmix64 step so that seed 0 is legal
    (the xorshift state itself must never be zero).
    """

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        self._state = state if state != 0 else _SPLITMIX_GAMMA
        self._spare: float | None = None

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * _XORSHIFT_MULT) & _MASK64

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def gauss(self) -> float:
        """Standard normal draw via Box-Muller (pairs cached)."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)


def derive_subseeds(seed: int, n: int) -> list[int]:
    """n independent sub-seeds derived deterministically from one seed."""
    rng = Xorshift64Star(seed)
    return [rng.next_u64() for _ in range(n)]


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic series."""

    kind: str
    seed: int
    length: int
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in SYNTH_KINDS:
            raise ValueError(f"unknown synth kind {self.kind!r}")
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")


def gen_noise(mean: float, std: float, n: int, seed: int) -> np.ndarray:
    """n i.i.d. Gaussian draws."""
    if std < 0:
        raise ValueError(f"std must be >= 0, got {std}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = Xorshift64Star(seed)
    return np.array([mean + std * rng.gauss() for _ in range(n)])


def gen_composite(
    n_components: int,
    n: int,
    seed: int,
    freq_range: tuple[float, float] = (2.0, 24.0),
    min_separation: float = 2.5,
    amp_range: tuple[float, float] = (0.5, 2.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Sum of sinusoids with random frequencies, amplitudes, and phases.

    Frequencies are in cycles over the full window, drawn uniformly over the
    region where all pairs are at least `min_separation` apart (sorted-gap
    construction); closer pairs are not resolvable from the magnitude
    spectrum of a window this short. Returns (signal, true frequencies in
    cycles per step).
    """
    if n < 64:
        raise ValueError(f"n must be >= 64, got {n}")
    if n_components < 1:
        raise ValueError(f"n_components must be >= 1, got {n_components}")
    lo, hi = freq_range
    span = hi - lo - (n_components - 1) * min_separation
    if span < 0:
        raise ValueError(
            f"{n_components} components with separation {min_separation} "
            f"do not fit in {freq_range}"
        )
    rng = Xorshift64Star(seed)
    base = sorted(lo + span * rng.uniform() for _ in range(n_components))
    freqs_window = [b + i * min_separation for i, b in enumerate(base)]
    if freqs_window[-1] / n > 0.5:
        raise ValueError("top frequency exceeds the Nyquist limit")

    t = np.arange(n, dtype=np.float64)
    signal = np.zeros(n)
    a_lo, a_hi = amp_range
    for f in freqs_window:
        amplitude = a_lo + (a_hi - a_lo) * rng.uniform()
        phase = 2.0 * math.pi * rng.uniform()
        signal += amplitude * np.sin(2.0 * math.pi * f * t / n + phase)
    return signal, np.asarray(freqs_window) / n


def harmonic_grid(n: int, base_cycles: float = 4.0) -> np.ndarray:
    """Uniform x grid covering `base_cycles` full cycles of the base wave."""
    return 2.0 * math.pi * base_cycles * np.arange(n, dtype=np.float64) / n


def gen_harmonic(
    n_multiplier: int, n: int, phase: float = 0.0, base_cycles: float = 4.0
) -> np.ndarray:
    """sin(n_multiplier * x) sampled on the uniform x grid."""
    if n_multiplier < 1:
        raise ValueError(f"n_multiplier must be >= 1, got {n_multiplier}")
    return np.sin(n_multiplier * harmonic_grid(n, base_cycles) + phase)


def harmonic_base_features(n: int, base_cycles: float = 4.0) -> tuple[np.ndarray, np.ndarray]:
    """The (sin(x), cos(x)) base-wave pair for the harmonic experiment."""
    x = harmonic_grid(n, base_cycles)
    return np.sin(x), np.cos(x)


def _seasonal_wave(
    t: np.ndarray,
    periods: list[float],
    amplitudes: list[float],
    phases: list[float],
) -> np.ndarray:
    out = np.zeros(len(t))
    for period, amplitude, phase in zip(periods, amplitudes, phases):
        out += amplitude * np.sin(2.0 * math.pi * t / period + phase)
    return out


def gen_pattern(spec: SynthSpec) -> TimeSeries:
    """Generate one series from a spec.

    Supported kinds and their params (all optional, with defaults):
      noise:                mean=0, std=1
      linear_trend:         a=1 (slope), b=0 (offset), noise_std=0
      exp_trend:            a=1, b=0.003 (y = a * exp(b t)), noise_std=0
      seasonal:             periods=[24], amplitudes=[1], phases=[0], noise_std=0
      additive_combo:       trend + seasonal wave + noise, each from its own
                            sub-seed (slope, offset, periods, amplitudes,
                            phases, noise_std)
      multiplicative_combo: trend * (1 + seasonal wave), params as above
      composite:            n_components=5 (+ gen_composite keyword params)
      harmonic:             multiplier=1, phase=0, base_cycles=4
    Grid params: freq (code, default "H"), start (ISO string), id.
    """
    p = dict(spec.params)
    n = spec.length
    t = np.arange(n, dtype=np.float64)
    sub = derive_subseeds(spec.seed, 3)

    def wave_params() -> tuple[list[float], list[float], list[float]]:
        periods = [float(x) for x in p.get("periods", [24.0])]
        amplitudes = [float(x) for x in p.get("amplitudes", [1.0] * len(periods))]
        phases = [float(x) for x in p.get("phases", [0.0] * len(periods))]
        return periods, amplitudes, phases

    kind = spec.kind
    if kind == "noise":
        values = gen_noise(float(p.get("mean", 0.0)), float(p.get("std", 1.0)), n, sub[0])
    elif kind == "linear_trend":
        values = float(p.get("a", 1.0)) * t + float(p.get("b", 0.0))
        if p.get("noise_std", 0.0):
            values = values + gen_noise(0.0, float(p["noise_std"]), n, sub[0])
    elif kind == "exp_trend":
        values = float(p.get("a", 1.0)) * np.exp(float(p.get("b", 0.003)) * t)
        if p.get("noise_std", 0.0):
            values = values + gen_noise(0.0, float(p["noise_std"]), n, sub[0])
    elif kind == "seasonal":
        values = _seasonal_wave(t, *wave_params())
        if p.get("noise_std", 0.0):
            values = values + gen_noise(0.0, float(p["noise_std"]), n, sub[0])
    elif kind == "additive_combo":
        trend = float(p.get("slope", 0.01)) * t + float(p.get("offset", 0.0))
        wave = _seasonal_wave(t, *wave_params())
        noise = gen_noise(0.0, float(p.get("noise_std", 0.1)), n, sub[1])
        values = trend + wave + noise
    elif kind == "multiplicative_combo":
        trend = float(p.get("slope", 0.01)) * t + float(p.get("offset", 1.0))
        wave = _seasonal_wave(t, *wave_params())
        values = trend * (1.0 + wave)
        if p.get("noise_std", 0.0):
            values = values + gen_noise(0.0, float(p["noise_std"]), n, sub[1])
    elif kind == "composite":
        kwargs = {}
        for key in ("freq_range", "min_separation", "amp_range"):
            if key in p:
                kwargs[key] = tuple(p[key]) if key.endswith("range") else float(p[key])
        values, _ = gen_composite(int(p.get("n_components", 5)), n, sub[0], **kwargs)
    elif kind == "harmonic":
        values = gen_harmonic(
            int(p.get("multiplier", 1)), n,
            phase=float(p.get("phase", 0.0)),
            base_cycles=float(p.get("base_cycles", 4.0)),
        )
    else:  # pragma: no cover - guarded by SynthSpec
        raise ValueError(f"unknown synth kind {kind!r}")

    start = (
        datetime.fromisoformat(p["start"]) if "start" in p else _DEFAULT_START
    )
    freq = Frequency.parse(str(p.get("freq", "H")))
    return TimeSeries(
        id=str(p.get("id", f"{kind}-{spec.seed}")),
        start=start,
        freq=freq,
        values=values,
    )


def _sharp_daily(t: np.ndarray, amplitude: float, phase: float = 0.0) -> np.ndarray:
    # exp(sin) has strong second and third harmonics, so spectral detection
    # finds several genuine peaks instead of noise
    x = 2.0 * math.pi * t / 24.0 + phase
    return amplitude * (np.exp(np.sin(x)) - 1.2661)


def ablation_suite(seed: int, n: int = 1000) -> list[TimeSeries]:
    """Periodic + trend suite for feature-ablation runs (hourly grid).

    Mixes calendar-aligned daily/weekly patterns with periods no calendar
    encoding can represent (17, 13/37, 31/47 steps, and a four-period mix),
    plus trends and a pure-noise anchor.
    """
    t = np.arange(n, dtype=np.float64)
    seeds = derive_subseeds(seed, 9)

    def nz(i: int, std: float) -> np.ndarray:
        return gen_noise(0.0, std, n, seeds[i])

    two_pi = 2.0 * math.pi
    members: list[tuple[str, np.ndarray]] = [
        ("daily-sharp", 2.0 + _sharp_daily(t, 1.5) + nz(0, 0.25)),
        ("daily-weekly",
         _sharp_daily(t, 1.0) + 1.2 * np.sin(two_pi * t / 168.0 + 1.0) + nz(1, 0.25)),
        ("p17", 2.5 * np.sin(two_pi * t / 17.0 + 0.5) + nz(2, 0.1)),
        ("p31-p47",
         1.6 * np.sin(two_pi * t / 31.0 + 2.1) + 1.1 * np.sin(two_pi * t / 47.0) + nz(3, 0.1)),
        ("p13-p37",
         1.4 * np.sin(two_pi * t / 13.0 + 0.3) + 1.2 * np.sin(two_pi * t / 37.0 + 4.0) + nz(4, 0.1)),
        ("multi-noncal",
         1.5 * np.sin(two_pi * t / 17.0) + 1.2 * np.sin(two_pi * t / 29.0 + 1.0)
         + 1.0 * np.sin(two_pi * t / 41.0 + 2.0) + 0.8 * np.sin(two_pi * t / 59.0 + 3.0)
         + nz(5, 0.1)),
        ("trend-daily", 0.003 * t + _sharp_daily(t, 1.2) + nz(6, 0.2)),
        ("trend-p17", 0.003 * t + 1.8 * np.sin(two_pi * t / 17.0) + nz(7, 0.15)),
        ("noise", 10.0 + nz(8, 1.0)),
    ]
    freq = Frequency("hour")
    return [
        TimeSeries(id=name, start=_DEFAULT_START, freq=freq, values=vals)
        for name, vals in members
    ]


def qualitative_suite(seed: int, n: int = 1000) -> list[TimeSeries]:
    """The qualitative scenarios: noise, trends, seasonal patterns, combos.

    Sized for an 800-step context with a 200-step horizon.
    """
    seeds = derive_subseeds(seed, 10)
    t = np.arange(n, dtype=np.float64)
    two_pi = 2.0 * math.pi
    hourly = Frequency("hour")
    weekly = Frequency("week")

    def ts(name: str, vals: np.ndarray, freq: Frequency = hourly) -> TimeSeries:
        return TimeSeries(id=name, start=_DEFAULT_START, freq=freq, values=vals)

    return [
        ts("noise-std", gen_noise(0.0, 1.0, n, seeds[0])),
        ts("noise-wide", gen_noise(100.0, 10.0, n, seeds[1]), weekly),
        ts("linear-trend", 0.01 * t + 5.0 + gen_noise(0.0, 0.5, n, seeds[2])),
        ts("exp-trend", 2.0 * np.exp(0.002 * t) + gen_noise(0.0, 0.3, n, seeds[3])),
        ts("seasonal-simple", 3.0 * np.sin(two_pi * t / 24.0) + gen_noise(0.0, 0.2, n, seeds[4])),
        ts("seasonal-complex",
           2.0 * np.sin(two_pi * t / 24.0) + 1.2 * np.sin(two_pi * t / 17.0 + 1.0)
           + 0.8 * np.sin(two_pi * t / 53.0 + 2.0) + gen_noise(0.0, 0.2, n, seeds[5])),
        ts("additive-combo",
           0.005 * t + 2.0 * np.sin(two_pi * t / 24.0) + gen_noise(0.0, 0.3, n, seeds[6])),
        ts("multiplicative-combo",
           (5.0 + 0.005 * t) * (1.0 + 0.5 * np.sin(two_pi * t / 24.0))
           + gen_noise(0.0, 0.2, n, seeds[7])),
    ]

"""Latent analog filters and their sampled layer weights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from ._rational import rationalize, round_half_away

__all__ = [
    "AnalogFilterParams",
    "FilterBankSpec",
    "WeightMatrix",
    "modulated_gaussian",
    "init_filterbank",
    "tap_range",
    "round_taps",
    "generate_weights",
]

Rounding = Literal["nearest", "floor", "ceil"]


@dataclass(frozen=True)
class AnalogFilterParams:
    """Modulated Gaussian prototype: center ``mu`` and width ``sigma`` in rad/s, phase ``phi``."""

    mu: float
    sigma: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("mu", "sigma", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")


@dataclass(frozen=True)
class FilterBankSpec:
    filters: tuple[AnalogFilterParams, ...]
    kernel_duration: float
    stride_duration: float
    train_period: float | Fraction

    def __post_init__(self):
        object.__setattr__(self, "filters", tuple(self.filters))
        if not self.filters:
            raise ValueError("filterbank needs at least one filter")
        for name in ("kernel_duration", "stride_duration", "train_period"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name, dur in (("kernel", self.kernel_duration), ("stride", self.stride_duration)):
            ratio = rationalize(dur) / rationalize(self.train_period)
            if ratio.denominator != 1:
                raise ValueError(f"{name} duration is not an integer number of trained samples ({float(ratio)})")

    @property
    def n_channels(self) -> int:
        return len(self.filters)

    @property
    def train_rate(self) -> Fraction:
        return 1 / rationalize(self.train_period)

    @property
    def train_kernel(self) -> int:
        return int(rationalize(self.kernel_duration) / rationalize(self.train_period))

    @property
    def train_stride(self) -> int:
        return int(rationalize(self.stride_duration) / rationalize(self.train_period))

    def to_dict(self) -> dict:
        return {
            "filters": [{"mu": f.mu, "sigma": f.sigma, "phi": f.phi} for f in self.filters],
            "kernel_duration": float(self.kernel_duration),
            "stride_duration": float(self.stride_duration),
            "train_period": float(self.train_period),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FilterBankSpec":
        try:
            filters = [AnalogFilterParams(float(f["mu"]), float(f["sigma"]), float(f.get("phi", 0.0)))
                       for f in data["filters"]]
            return cls(filters, float(data["kernel_duration"]), float(data["stride_duration"]),
                       rationalize(float(data["train_period"])))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed filterbank document: {exc}") from exc


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """C x K taps; column ``center_index`` holds tap ``k = 0``."""

    taps: np.ndarray
    center_index: int
    period: float | Fraction

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64, copy=True)
        if taps.ndim != 2 or taps.shape[0] < 1 or taps.shape[1] < 1:
            raise ValueError("taps must be a non-empty C x K matrix")
        lo, _ = tap_range(taps.shape[1])
        if self.center_index != -lo:
            raise ValueError(f"center_index must be {-lo} for {taps.shape[1]} taps")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def n_channels(self) -> int:
        return self.taps.shape[0]

    @property
    def k_taps(self) -> int:
        return self.taps.shape[1]

    @property
    def k_min(self) -> int:
        return -self.center_index

    def tap(self, c: int, k: int) -> float:
        return float(self.taps[c, k + self.center_index])


def modulated_gaussian(params: AnalogFilterParams, t):
    """Impulse response ``2 sqrt(2 sigma^2 pi) exp(-sigma^2 t^2 / 2) cos(mu t + phi)``."""
    t = np.asarray(t, dtype=np.float64)
    s2 = params.sigma * params.sigma
    out = 2.0 * math.sqrt(2.0 * s2 * math.pi) * np.exp(-s2 * t * t / 2.0) * np.cos(params.mu * t + params.phi)
    return float(out) if out.ndim == 0 else out


def init_filterbank(n_channels: int, f_min: float, f_max: float, kernel_duration: float,
                    stride_duration: float, train_period) -> FilterBankSpec:
    """Linearly spaced modulated Gaussians whose neighbours overlap at half power."""
    if n_channels < 2:
        raise ValueError("need at least two channels")
    nyquist = float(1 / (2 * rationalize(train_period)))
    if not (0 <= f_min < f_max):
        raise ValueError("need 0 <= f_min < f_max")
    if f_max >= nyquist:
        raise ValueError(f"f_max={f_max} Hz is at or above the trained Nyquist {nyquist} Hz")
    mus = np.linspace(2 * math.pi * f_min, 2 * math.pi * f_max, n_channels)
    sigma = (mus[1] - mus[0]) / (2 * math.sqrt(2 * math.log(2)))
    filters = [AnalogFilterParams(float(mu), float(sigma), 0.0) for mu in mus]
    return FilterBankSpec(filters, kernel_duration, stride_duration, rationalize(train_period))


def tap_range(k_taps: int) -> tuple[int, int]:
    """Inclusive tap index range ``floor(-(K-1)/2) .. floor((K-1)/2)``."""
    return -(k_taps // 2), (k_taps - 1) // 2


def round_taps(value: Fraction, rounding: Rounding = "nearest") -> int:
    if rounding == "nearest":
        return round_half_away(value)
    if rounding == "floor":
        return math.floor(value)
    if rounding == "ceil":
        return math.ceil(value)
    raise ValueError(f"unknown rounding mode {rounding!r}")


def generate_weights(spec: FilterBankSpec, target_period, rounding: Rounding = "nearest",
                     k_taps: int | None = None) -> WeightMatrix:
    """Sample each prototype on the target grid and reverse it in time.

    Tap ``(c, k)`` is ``T * f_c(-k T)``; the factor ``T`` keeps the layer gain
    independent of the sampling rate.  ``k_taps`` overrides the rounded
    kernel length.
    """
    if not target_period > 0:
        raise ValueError("target_period must be positive")
    if k_taps is None:
        k_float = rationalize(spec.kernel_duration) / rationalize(target_period)
        k_taps = round_taps(k_float, rounding)
    if k_taps < 1:
        raise ValueError(f"kernel rounds to {k_taps} taps at this sampling period")
    lo, hi = tap_range(k_taps)
    period = float(target_period)
    times = -np.arange(lo, hi + 1, dtype=np.float64) * period
    taps = np.stack([period * modulated_gaussian(p, times) for p in spec.filters])
    return WeightMatrix(taps, -lo, target_period)

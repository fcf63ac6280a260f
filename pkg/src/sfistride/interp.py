"""Windowed sinc kernels and bandlimited interpolation of sampled buffers.

Positions are handled in *normalized* units (multiples of the sampling
period) wherever possible.  When the ratio between two sample grids is a
rational number, all summation bounds are computed in integer arithmetic and
only the kernel itself is evaluated in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np
from scipy import special

from ._rational import rate_from_period

__all__ = [
    "KAISER_BETA",
    "WindowSpec",
    "SignalBuffer",
    "sinc",
    "window_eval",
    "windowed_sinc",
    "kernel",
    "interpolate",
    "resample",
    "interp_grid",
]

#: default Kaiser shape, the value used by common bandlimited resamplers
KAISER_BETA = 14.769656459379492

# snap tolerance (in sampling periods) for float positions near an integer
_SNAP = 1e-9

WindowKind = Literal["kaiser", "hann", "rectangular"]


@dataclass(frozen=True)
class WindowSpec:
    """Finite-support window for the sinc kernel.

    The window is zero for ``|t| > L * period / 2``, so ``L`` is the total
    support width measured in sampling periods.
    """

    kind: WindowKind = "kaiser"
    beta: float = KAISER_BETA
    L: int = 16

    def __post_init__(self):
        if self.kind not in ("kaiser", "hann", "rectangular"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")

    @property
    def half_width(self) -> float:
        return self.L / 2


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """A 1-D real signal together with its sampling period (seconds).

    Reads outside ``[0, len - 1]`` return zero.
    """

    samples: np.ndarray
    period: float | Fraction
    _rate: Fraction | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        data = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        if not np.all(np.isfinite(data)):
            raise ValueError("signal contains NaN or Inf")
        if not (self.period > 0 and math.isfinite(float(self.period))):
            raise ValueError("period must be positive and finite")
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __getitem__(self, n: int) -> float:
        if 0 <= n < len(self):
            return float(self.samples[n])
        return 0.0

    @property
    def rate(self) -> Fraction:
        """Sampling rate in Hz as an exact fraction."""
        if self._rate is None:
            object.__setattr__(self, "_rate", rate_from_period(self.period))
        return self._rate

    @classmethod
    def from_rate(cls, samples, rate) -> "SignalBuffer":
        rate = Fraction(rate)
        return cls(samples, 1 / rate)

    def with_samples(self, samples) -> "SignalBuffer":
        return SignalBuffer(samples, self.period)


def sinc(t):
    """Normalized sinc, ``sin(pi t) / (pi t)``.

    Returns exactly 0 at nonzero integers and exactly 1 at 0.
    """
    arr = np.asarray(t, dtype=np.float64)
    out = np.sinc(arr)
    on_grid = arr == np.round(arr)
    out = np.where(on_grid, np.where(arr == 0, 1.0, 0.0), out)
    if out.ndim == 0:
        return float(out)
    return out


def _window_normalized(spec: WindowSpec, u):
    """Window evaluated at ``u`` sampling periods from the center."""
    a = np.abs(np.asarray(u, dtype=np.float64))
    half = spec.half_width
    inside = a <= half
    r = np.where(inside, a / half, 0.0)
    if spec.kind == "kaiser":
        arg = spec.beta * np.sqrt(np.maximum(1.0 - r * r, 0.0))
        # i0e avoids overflow for large beta
        g = special.i0e(arg) / special.i0e(spec.beta) * np.exp(arg - spec.beta)
    elif spec.kind == "hann":
        g = 0.5 * (1.0 + np.cos(np.pi * r))
    else:
        g = np.ones_like(a)
    return np.where(inside, g, 0.0)


def kernel(spec: WindowSpec, u):
    """Windowed sinc in normalized time: ``g(u) * sinc(u)`` with ``u = t / T``.

    Evaluated through ``|u|`` so the result is even to the last bit.
    """
    a = np.abs(np.asarray(u, dtype=np.float64))
    out = _window_normalized(spec, a) * sinc(a)
    out = np.where(a <= spec.half_width, out, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def window_eval(spec: WindowSpec, t, period):
    """Window value ``g(t)`` for a kernel of sampling period ``period``."""
    if not period > 0:
        raise ValueError("period must be positive")
    out = _window_normalized(spec, np.asarray(t, dtype=np.float64) / float(period))
    return float(out) if out.ndim == 0 else out


def windowed_sinc(spec: WindowSpec, t, period):
    """``h(t, T) = g(t) sinc(t / T)``; exactly zero outside the support."""
    if not period > 0:
        raise ValueError("period must be positive")
    return kernel(spec, np.asarray(t, dtype=np.float64) / float(period))


def _snap(v: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) < _SNAP else v


def interpolate(x: SignalBuffer, spec: WindowSpec, t: float) -> float:
    """Evaluate the bandlimited interpolant of ``x`` at time ``t`` seconds."""
    u = _snap(float(t) / float(x.period))
    lo = math.ceil(_snap(u - spec.half_width))
    hi = math.floor(_snap(u + spec.half_width))
    lo_valid = max(lo, 0)
    hi_valid = min(hi, len(x) - 1)
    if hi_valid < lo_valid:
        return 0.0
    n = np.arange(lo_valid, hi_valid + 1)
    return float(np.dot(x.samples[lo_valid : hi_valid + 1], kernel(spec, u - n)))


def _accumulate(src: np.ndarray, lo: np.ndarray, hi: np.ndarray, arg_at, spec: WindowSpec) -> np.ndarray:
    """Sum ``src[..., n] * kernel(arg_at(n))`` for ``lo <= n <= hi`` per output.

    ``src`` has shape (C, N); the result has shape (C, len(lo)).  Indices
    outside ``[0, N)`` contribute zero.
    """
    n_src = src.shape[-1]
    count = lo.shape[0]
    out = np.zeros((src.shape[0], count), dtype=np.float64)
    if count == 0 or n_src == 0:
        return out
    width = int(np.max(hi - lo)) + 1 if count else 0
    for offset in range(max(width, 0)):
        n = lo + offset
        valid = (n <= hi) & (n >= 0) & (n < n_src)
        if not np.any(valid):
            continue
        weights = np.where(valid, kernel(spec, arg_at(n)), 0.0)
        out += src[:, np.clip(n, 0, n_src - 1)] * weights
    return out


def interp_grid(src: np.ndarray, step: Fraction, count: int, spec: WindowSpec,
                stretch: Fraction = Fraction(1)) -> np.ndarray:
    """Interpolate ``src`` at the rational positions ``j * step``, ``j < count``.

    ``src`` is (C, N) or (N,), sampled on the integer grid.  The kernel
    argument for source index ``n`` is ``(j * step - n) / stretch`` and the
    summation runs over every ``n`` with ``|j * step - n| <= L * stretch / 2``;
    both bounds are evaluated exactly.  No gain is applied.
    """
    step = Fraction(step)
    stretch = Fraction(stretch)
    if step <= 0 or stretch <= 0:
        raise ValueError("step and stretch must be positive")
    squeeze = src.ndim == 1
    src2 = np.atleast_2d(np.asarray(src, dtype=np.float64))
    a, b = step.numerator, step.denominator
    c, d = stretch.numerator, stretch.denominator
    L = spec.L
    j = np.arange(count, dtype=np.int64)
    # |j a / b - n| <= L c / (2 d)  <=>  (2 d j a - L c b) / (2 b d) <= n <= (2 d j a + L c b) / (2 b d)
    den = 2 * b * d
    lo = -((-(2 * d * a * j - L * c * b)) // den)
    hi = (2 * d * a * j + L * c * b) // den
    ja = j * a

    def arg_at(n):
        return ((ja - n * b) * d).astype(np.float64) / float(b * c)

    out = _accumulate(src2, lo, hi, arg_at, spec)
    return out[0] if squeeze else out


def _interp_float(src: np.ndarray, positions: np.ndarray, stretch: float, spec: WindowSpec) -> np.ndarray:
    positions = np.asarray(positions, dtype=np.float64)
    rounded = np.round(positions)
    positions = np.where(np.abs(positions - rounded) < _SNAP, rounded, positions)
    half = spec.half_width * stretch

    def snapped(v):
        r = np.round(v)
        return np.where(np.abs(v - r) < _SNAP, r, v)

    lo = np.ceil(snapped(positions - half)).astype(np.int64)
    hi = np.floor(snapped(positions + half)).astype(np.int64)
    out = _accumulate(np.atleast_2d(src), lo, hi, lambda n: (positions - n) / stretch, spec)
    return out[0]


def resample(x: SignalBuffer, out_period, spec: WindowSpec | None = None, antialias: bool = True) -> SignalBuffer:
    """Resample ``x`` onto a grid with period ``out_period``.

    Output sample ``m`` is the interpolant at ``t = m * out_period``.  With
    ``antialias`` set and a coarser output grid, the kernel is widened to the
    output period (lowpass at the output Nyquist) and scaled by
    ``in_period / out_period``.
    """
    spec = spec or WindowSpec()
    if not out_period > 0:
        raise ValueError("out_period must be positive")
    try:
        ratio = x.rate / rate_from_period(out_period)  # out_period / in_period
    except ValueError:
        ratio = None
    if ratio is not None:
        count = ((len(x) - 1) * ratio.denominator) // ratio.numerator + 1 if len(x) else 0
        stretch = ratio if (antialias and ratio > 1) else Fraction(1)
        out = interp_grid(x.samples, ratio, count, spec, stretch)
        if stretch != 1:
            out = out / float(stretch)
        return SignalBuffer(out, out_period)
    r = float(out_period) / float(x.period)
    count = math.floor(_snap((len(x) - 1) / r)) + 1 if len(x) else 0
    stretch = r if (antialias and r > 1) else 1.0
    out = _interp_float(x.samples, np.arange(count) * r, stretch, spec)
    if stretch != 1.0:
        out = out / stretch
    return SignalBuffer(out, out_period)

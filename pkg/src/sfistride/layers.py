"""Sampling-frequency-independent convolution and transposed convolution.

Both layers accept a rational stride.  For an integer stride they reduce to
ordinary strided (transposed) convolution and take a direct fast path; for a
fractional stride the decimation (or zero insertion) is replaced by windowed
sinc interpolation evaluated exactly at the instants ``m * S``.

Neither layer applies an anti-aliasing filter when decimating: the kernel is
always evaluated on the target sampling period, which is what a plain strided
convolution does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import signal as sps

from ._rational import rate_from_period, rationalize
from .filters import FilterBankSpec, Rounding, WeightMatrix, round_taps
from .interp import SignalBuffer, WindowSpec, interp_grid

__all__ = [
    "RationalStride",
    "LayerGeometry",
    "FeatureMap",
    "adjust_geometry",
    "frame_count",
    "make_geometry",
    "cross_correlate",
    "sfi_conv_forward",
    "sfi_transposed_forward",
]

_PERIOD_RTOL = 1e-12


@dataclass(frozen=True)
class RationalStride:
    """Stride of ``num / den`` samples, kept in lowest terms."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.num < 1 or self.den < 1:
            raise ValueError("stride numerator and denominator must be positive")
        g = math.gcd(self.num, self.den)
        object.__setattr__(self, "num", self.num // g)
        object.__setattr__(self, "den", self.den // g)
        if self.num < self.den:
            raise ValueError(f"stride {self.num}/{self.den} is below one sample")

    @classmethod
    def from_value(cls, value) -> "RationalStride":
        frac = Fraction(value)
        return cls(frac.numerator, frac.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_integer(self) -> bool:
        return self.den == 1

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


@dataclass(frozen=True)
class LayerGeometry:
    k_taps: int
    stride: RationalStride
    target_period: float | Fraction
    padding: int = 0
    window: WindowSpec = field(default_factory=WindowSpec)

    def __post_init__(self):
        if self.k_taps < 1:
            raise ValueError("k_taps must be >= 1")
        if self.padding < 0:
            raise ValueError("padding must be >= 0")
        if not self.target_period > 0:
            raise ValueError("target_period must be positive")
        if not isinstance(self.stride, RationalStride):
            object.__setattr__(self, "stride", RationalStride.from_value(self.stride))

    @property
    def frame_period(self) -> Fraction | float:
        """Spacing of the output frames, ``S * T`` seconds (exact when possible)."""
        try:
            return self.stride.fraction / rate_from_period(self.target_period)
        except ValueError:
            return float(self.stride) * float(self.target_period)


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """C x M pseudo time-frequency representation with frames every ``frame_period`` s."""

    values: np.ndarray
    frame_period: float | Fraction

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 2:
            raise ValueError("feature map must be C x M")
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature map contains NaN or Inf")
        if not self.frame_period > 0:
            raise ValueError("frame_period must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    @property
    def frame_rate(self) -> Fraction | float:
        if isinstance(self.frame_period, Fraction):
            return 1 / self.frame_period
        return 1.0 / self.frame_period


def adjust_geometry(k_train: int, s_train: int, train_period, target_period) -> tuple[float, RationalStride]:
    """Kernel size and stride at the target rate that keep the trained durations.

    Returns the unrounded kernel size and the exact stride
    ``s_train * train_period / target_period``.  Periods whose rates are not
    (close to) rational numbers are rejected.
    """
    if k_train < 1 or s_train < 1:
        raise ValueError("trained kernel size and stride must be positive")
    # train_period / target_period, formed from the exact rates
    ratio = rate_from_period(target_period) / rate_from_period(train_period)
    return float(k_train * ratio), RationalStride.from_value(s_train * ratio)


def frame_count(n_corr: int, stride: RationalStride) -> int:
    """Number of instants ``m * S`` that fall inside ``[0, n_corr - 1]``."""
    if n_corr < 1:
        raise ValueError("correlation length must be >= 1")
    return (n_corr - 1) * stride.den // stride.num + 1


def make_geometry(spec: FilterBankSpec, target_period, window: WindowSpec | None = None,
                  padding: int = 0, stride=None, rounding: Rounding = "nearest") -> LayerGeometry:
    """Geometry for ``spec`` realized at ``target_period``.

    ``stride`` overrides the adjusted stride (used by the rounding baseline).
    """
    target_period = rationalize(target_period)
    _, adjusted = adjust_geometry(spec.train_kernel, spec.train_stride, spec.train_period, target_period)
    k_taps = round_taps(rationalize(spec.kernel_duration) / target_period, rounding)
    if stride is None:
        stride = adjusted
    return LayerGeometry(k_taps, stride, target_period, padding, window or WindowSpec())


def _check_period(name: str, period, target) -> None:
    a, b = float(period), float(target)
    if abs(a - b) > _PERIOD_RTOL * b:
        raise ValueError(f"{name} period {a} does not match geometry period {b}")


def _padded(x: SignalBuffer, padding: int) -> np.ndarray:
    return np.pad(x.samples, padding) if padding else x.samples


def cross_correlate(x: SignalBuffer, w: WeightMatrix, padding: int = 0) -> np.ndarray:
    """``y[c, i] = sum_k x_pad[i - k_min + k] * w[c, k]`` over the valid range.

    The input is zero padded by ``padding`` samples on both sides; the result
    has ``I = N + 2P - K + 1`` columns, column 0 being the first window that
    lies entirely inside the padded signal.
    """
    xp = _padded(x, padding)
    n_corr = xp.shape[0] - w.k_taps + 1
    if n_corr < 1:
        raise ValueError(f"signal of {len(x)} samples is too short for {w.k_taps} taps with padding {padding}")
    out = np.empty((w.n_channels, n_corr))
    for c in range(w.n_channels):
        out[c] = sps.correlate(xp, w.taps[c], mode="valid")
    return out


def _strided_direct(xp: np.ndarray, w: WeightMatrix, step: int, count: int) -> np.ndarray:
    # tap-major accumulation; frames are sums over k in ascending order
    out = np.zeros((w.n_channels, count))
    starts = np.arange(count) * step
    for j in range(w.k_taps):
        out += w.taps[:, j : j + 1] * xp[starts + j]
    return out


def sfi_conv_forward(x: SignalBuffer, w: WeightMatrix, geom: LayerGeometry,
                     force_interpolation: bool = False) -> FeatureMap:
    """SFI convolution: correlate, then sample the interpolated result every ``S`` samples.

    ``force_interpolation`` sends integer strides through the sinc path; it
    exists for testing the reduction to plain decimation.
    """
    _check_period("signal", x.period, geom.target_period)
    _check_period("weight", w.period, geom.target_period)
    if w.k_taps != geom.k_taps:
        raise ValueError(f"weights have {w.k_taps} taps, geometry expects {geom.k_taps}")
    xp = _padded(x, geom.padding)
    n_corr = xp.shape[0] - w.k_taps + 1
    if n_corr < 1:
        raise ValueError(f"signal of {len(x)} samples is too short for {w.k_taps} taps with padding {geom.padding}")
    n_frames = frame_count(n_corr, geom.stride)
    if geom.stride.is_integer and not force_interpolation:
        values = _strided_direct(xp, w, geom.stride.num, n_frames)
    else:
        y = cross_correlate(x, w, geom.padding)
        values = interp_grid(y, geom.stride.fraction, n_frames, geom.window)
    return FeatureMap(values, geom.frame_period)


def _transposed_direct(X: np.ndarray, w: WeightMatrix, step: int, n_corr: int, padding: int,
                       out_len: int) -> np.ndarray:
    n_frames = min(X.shape[1], (n_corr - 1) // step + 1)
    acc = np.zeros((w.n_channels, out_len))
    frames = np.arange(n_frames)
    for j in range(w.k_taps):
        # frame m lands on padded index m*S; tap j maps it to output n = m*S - P + j
        n = frames * step - padding + j
        keep = (n >= 0) & (n < out_len)
        acc[:, n[keep]] += w.taps[:, j : j + 1] * X[:, frames[keep]]
    return acc


def sfi_transposed_forward(X: FeatureMap, w: WeightMatrix, geom: LayerGeometry, out_len: int,
                           force_interpolation: bool = False) -> SignalBuffer:
    """SFI transposed convolution with a channel sum, producing ``out_len`` samples.

    Frames are placed at the instants ``m * S``, interpolated back onto the
    integer grid, and passed through the adjoint of :func:`cross_correlate`.
    With matching geometry this is the exact adjoint of
    :func:`sfi_conv_forward` for every stride.
    """
    _check_period("weight", w.period, geom.target_period)
    if not math.isclose(float(X.frame_period), float(geom.frame_period), rel_tol=_PERIOD_RTOL):
        raise ValueError("feature map frame period does not match geometry")
    if X.n_channels != w.n_channels:
        raise ValueError(f"feature map has {X.n_channels} channels, weights have {w.n_channels}")
    if w.k_taps != geom.k_taps:
        raise ValueError(f"weights have {w.k_taps} taps, geometry expects {geom.k_taps}")
    if out_len < 1:
        raise ValueError("out_len must be >= 1")
    n_corr = out_len + 2 * geom.padding - w.k_taps + 1
    if n_corr < 1:
        raise ValueError(f"out_len {out_len} is too short for {w.k_taps} taps with padding {geom.padding}")
    if geom.stride.is_integer and not force_interpolation:
        acc = _transposed_direct(X.values, w, geom.stride.num, n_corr, geom.padding, out_len)
    else:
        inv = 1 / geom.stride.fraction
        y = interp_grid(X.values, inv, n_corr, geom.window, stretch=inv)
        acc = np.empty((w.n_channels, out_len))
        for c in range(w.n_channels):
            full = sps.convolve(y[c], w.taps[c], mode="full")
            acc[c] = full[geom.padding : geom.padding + out_len]
    total = np.zeros(out_len)
    for c in range(w.n_channels):
        total += acc[c]
    return SignalBuffer(total, geom.target_period)

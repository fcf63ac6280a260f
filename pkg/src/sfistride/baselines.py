"""Stride-handling strategies compared against the interpolating layers.

``proposed``
    run the layers at the input rate with the exact fractional stride.
``rounding``
    round the stride to the nearest integer.
``resampling_near``
    resample to the closest rate at which the stride is an integer, process,
    and resample back.
``resampling_trained``
    resample to the trained rate, process, and resample back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from ._rational import rationalize, round_half_away
from .filters import FilterBankSpec, generate_weights
from .interp import SignalBuffer, WindowSpec, resample
from .layers import FeatureMap, LayerGeometry, RationalStride, make_geometry
from .pipeline import MaskSource, apply_mask, decode, encode

__all__ = [
    "STRATEGIES",
    "StrategyConfig",
    "StrategyRun",
    "round_stride",
    "nearest_integer_stride_sf",
    "execute_strategy",
    "run_strategy",
]

StrategyKind = Literal["proposed", "rounding", "resampling_near", "resampling_trained"]
STRATEGIES: tuple[str, ...] = ("proposed", "rounding", "resampling_near", "resampling_trained")


@dataclass(frozen=True)
class StrategyConfig:
    kind: StrategyKind = "proposed"
    window: WindowSpec = field(default_factory=WindowSpec)
    padding: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}; expected one of {STRATEGIES}")


@dataclass(frozen=True, eq=False)
class StrategyRun:
    output: SignalBuffer
    features: FeatureMap
    geometry: LayerGeometry
    adjusted_stride: RationalStride
    internal_rate: Fraction


def round_stride(stride) -> int:
    """Nearest integer stride, ties away from zero."""
    if isinstance(stride, RationalStride):
        stride = stride.fraction
    return round_half_away(Fraction(stride))


def nearest_integer_stride_sf(f_train, s_train: int, f_target) -> Fraction:
    """Closest rate ``f_train * k / s_train`` to ``f_target`` (ties go to the lower rate)."""
    f_train = rationalize(f_train)
    f_target = rationalize(f_target)
    if f_train <= 0 or s_train < 1 or f_target <= 0:
        raise ValueError("rates and stride must be positive")
    step = f_train / s_train
    k_lo = max(math.floor(f_target / step), 1)
    best = None
    for k in (k_lo, k_lo + 1):
        cand = step * k
        if best is None or abs(cand - f_target) < abs(best - f_target):
            best = cand
    return best


def _fit_length(samples: np.ndarray, n: int) -> np.ndarray:
    if samples.shape[0] >= n:
        return samples[:n]
    return np.concatenate([samples, np.zeros(n - samples.shape[0])])


def _process(x: SignalBuffer, spec: FilterBankSpec, geom: LayerGeometry, mask: MaskSource, j: int):
    w = generate_weights(spec, geom.target_period, k_taps=geom.k_taps)
    X = encode(x, w, geom)
    y = decode(apply_mask(X, mask, j), w, geom, len(x))
    return y, X


def execute_strategy(x: SignalBuffer, spec: FilterBankSpec, cfg: StrategyConfig,
                     mask: MaskSource | None = None, source: int = 0) -> StrategyRun:
    """Run one strategy end to end and keep the intermediate geometry."""
    mask = mask or MaskSource()
    rate = x.rate
    f_train = spec.train_rate
    s_train = spec.train_stride
    adjusted = make_geometry(spec, 1 / rate).stride

    if cfg.kind in ("proposed", "rounding"):
        stride = adjusted if cfg.kind == "proposed" else RationalStride(round_stride(adjusted))
        geom = make_geometry(spec, 1 / rate, cfg.window, cfg.padding, stride=stride)
        y, X = _process(x, spec, geom, mask, source)
        return StrategyRun(y, X, geom, adjusted, rate)

    inner_rate = nearest_integer_stride_sf(f_train, s_train, rate) if cfg.kind == "resampling_near" else f_train
    inner = resample(x, 1 / inner_rate) if inner_rate != rate else x
    geom = make_geometry(spec, 1 / inner_rate, cfg.window, cfg.padding)
    if not geom.stride.is_integer:
        raise AssertionError(f"internal rate {inner_rate} Hz does not give an integer stride")
    y_inner, X = _process(inner, spec, geom, mask, source)
    y = resample(y_inner, x.period) if inner_rate != rate else y_inner
    out = SignalBuffer(_fit_length(y.samples, len(x)), x.period)
    return StrategyRun(out, X, geom, adjusted, inner_rate)


def run_strategy(x: SignalBuffer, spec: FilterBankSpec, cfg: StrategyConfig,
                 mask: MaskSource | None = None, source: int = 0) -> SignalBuffer:
    """Separated (or reconstructed) signal, same length and rate as ``x``."""
    return execute_strategy(x, spec, cfg, mask, source).output

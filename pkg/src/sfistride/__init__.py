"""Sampling-frequency-independent convolution layers with fractional strides."""

from .baselines import STRATEGIES, StrategyConfig, execute_strategy, nearest_integer_stride_sf, round_stride, run_strategy
from .filters import (AnalogFilterParams, FilterBankSpec, WeightMatrix, generate_weights, init_filterbank,
                      modulated_gaussian)
from .interp import KAISER_BETA, SignalBuffer, WindowSpec, interpolate, resample, sinc, window_eval, windowed_sinc
from .layers import (FeatureMap, LayerGeometry, RationalStride, adjust_geometry, cross_correlate, frame_count,
                     make_geometry, sfi_conv_forward, sfi_transposed_forward)
from .metrics import least_squares_scales, si_snr
from .pipeline import MaskSource, apply_mask, decode, encode, roundtrip

__version__ = "0.1.0"

__all__ = [
    "AnalogFilterParams",
    "FeatureMap",
    "FilterBankSpec",
    "KAISER_BETA",
    "LayerGeometry",
    "MaskSource",
    "RationalStride",
    "STRATEGIES",
    "SignalBuffer",
    "StrategyConfig",
    "WeightMatrix",
    "WindowSpec",
    "adjust_geometry",
    "apply_mask",
    "cross_correlate",
    "decode",
    "encode",
    "execute_strategy",
    "frame_count",
    "generate_weights",
    "init_filterbank",
    "interpolate",
    "least_squares_scales",
    "make_geometry",
    "modulated_gaussian",
    "nearest_integer_stride_sf",
    "resample",
    "round_stride",
    "roundtrip",
    "run_strategy",
    "si_snr",
    "sfi_conv_forward",
    "sfi_transposed_forward",
    "sinc",
    "window_eval",
    "windowed_sinc",
]

"""Encoder / mask / decoder chain built from the SFI layers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .filters import FilterBankSpec, WeightMatrix, generate_weights
from .interp import SignalBuffer
from .layers import FeatureMap, LayerGeometry, sfi_conv_forward, sfi_transposed_forward
from .metrics import si_snr

__all__ = ["MaskSource", "encode", "apply_mask", "decode", "roundtrip"]

MaskKind = Literal["identity", "file", "band_select"]


@dataclass(frozen=True, eq=False)
class MaskSource:
    """Stand-in for a trained mask predictor.

    ``identity`` passes features through.  ``file`` carries a J x C x M array
    of per-frame masks.  ``band_select`` carries a J x C array of channel
    gains applied to every frame.
    """

    kind: MaskKind = "identity"
    payload: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "file", "band_select"):
            raise ValueError(f"unknown mask kind {self.kind!r}")
        if self.kind == "identity":
            object.__setattr__(self, "payload", None)
            return
        if self.payload is None:
            raise ValueError(f"{self.kind} mask needs a payload")
        data = np.array(self.payload, dtype=np.float64, copy=True)
        want = 3 if self.kind == "file" else 2
        if data.ndim != want:
            raise ValueError(f"{self.kind} mask payload must have {want} dimensions, got {data.ndim}")
        if not np.all((data >= 0.0) & (data <= 1.0)):
            raise ValueError("mask values must lie in [0, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "payload", data)

    @property
    def n_sources(self) -> int:
        return 1 if self.payload is None else self.payload.shape[0]

    @classmethod
    def band_select(cls, n_channels: int, bands) -> "MaskSource":
        """One source per ``(first, last)`` channel range, inclusive."""
        gains = np.zeros((len(bands), n_channels))
        for j, (lo, hi) in enumerate(bands):
            gains[j, lo : hi + 1] = 1.0
        return cls("band_select", gains)


def encode(x: SignalBuffer, w: WeightMatrix, geom: LayerGeometry) -> FeatureMap:
    """SFI convolution followed by a ReLU."""
    X = sfi_conv_forward(x, w, geom)
    return FeatureMap(np.maximum(X.values, 0.0), X.frame_period)


def apply_mask(X: FeatureMap, mask: MaskSource, j: int = 0) -> FeatureMap:
    if not 0 <= j < mask.n_sources:
        raise IndexError(f"source index {j} out of range for {mask.n_sources} sources")
    if mask.kind == "identity":
        return X
    if mask.kind == "file":
        m = mask.payload[j]
        if m.shape != X.values.shape:
            raise ValueError(f"mask shape {m.shape} does not match feature map {X.values.shape}")
        return FeatureMap(X.values * m, X.frame_period)
    gains = mask.payload[j]
    if gains.shape[0] != X.n_channels:
        raise ValueError(f"band mask has {gains.shape[0]} channels, feature map has {X.n_channels}")
    return FeatureMap(X.values * gains[:, None], X.frame_period)


def decode(X: FeatureMap, w: WeightMatrix, geom: LayerGeometry, out_len: int) -> SignalBuffer:
    """SFI transposed convolution summed over channels, ``out_len`` samples long."""
    return sfi_transposed_forward(X, w, geom, out_len)


def roundtrip(x: SignalBuffer, spec: FilterBankSpec, geom: LayerGeometry,
              weights: WeightMatrix | None = None) -> tuple[SignalBuffer, float]:
    """Encode and decode ``x`` with an identity mask.

    Returns the reconstruction and its SI-SNR against ``x``; the SI-SNR is
    NaN when it is undefined (silent input).
    """
    w = weights if weights is not None else generate_weights(spec, geom.target_period, k_taps=geom.k_taps)
    out = decode(encode(x, w, geom), w, geom, len(x))
    try:
        score = si_snr(out, x)
    except ValueError:
        score = math.nan
    return out, score

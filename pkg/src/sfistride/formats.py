"""On-disk formats for filterbanks, weights, masks and feature maps.

Array files share one layout: a single line of UTF-8 JSON (the header),
a newline, then the array as raw little-endian float64 in row-major order.
Periods are written both as floats and as exact fraction strings; readers
prefer the exact form.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .filters import FilterBankSpec, WeightMatrix
from .layers import FeatureMap
from .pipeline import MaskSource

__all__ = [
    "FormatError",
    "save_filterbank",
    "load_filterbank",
    "save_weights",
    "load_weights",
    "save_mask",
    "load_mask",
    "save_features",
    "load_features",
]

_DTYPE = np.dtype("<f8")


class FormatError(ValueError):
    """A file does not match the expected format."""


def _period_fields(period) -> dict:
    out = {"period": float(period)}
    if isinstance(period, Fraction):
        out["period_exact"] = str(period)
    return out


def _read_period(header: dict, key: str = "period"):
    exact = header.get(f"{key}_exact")
    if exact is not None:
        try:
            return Fraction(exact)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad exact {key} {exact!r}") from exc
    try:
        return float(header[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or bad {key}") from exc


def _write_array(path, header: dict, array: np.ndarray) -> None:
    line = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(line + b"\n")
        fh.write(np.ascontiguousarray(array, dtype=_DTYPE).tobytes())


def _read_array(path, kind: str, shape_keys: tuple[str, ...]) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    head, sep, body = raw.partition(b"\n")
    if not sep:
        raise FormatError(f"{path}: missing header line")
    try:
        header = json.loads(head.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: header is not JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != kind:
        raise FormatError(f"{path}: expected a {kind} file")
    try:
        shape = tuple(int(header[k]) for k in shape_keys)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: header lacks dimensions {shape_keys}") from exc
    if any(s < 0 for s in shape):
        raise FormatError(f"{path}: negative dimension in {shape}")
    expected = int(np.prod(shape)) * _DTYPE.itemsize
    if len(body) != expected:
        raise FormatError(f"{path}: payload has {len(body)} bytes, header implies {expected}")
    data = np.frombuffer(body, dtype=_DTYPE).reshape(shape).astype(np.float64)
    return header, data


def save_filterbank(path, spec: FilterBankSpec) -> None:
    doc = spec.to_dict()
    if isinstance(spec.train_period, Fraction):
        doc["train_period_exact"] = str(spec.train_period)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_filterbank(path) -> FilterBankSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object")
    try:
        spec = FilterBankSpec.from_dict(doc)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if "train_period_exact" in doc:
        spec = FilterBankSpec(spec.filters, spec.kernel_duration, spec.stride_duration,
                              Fraction(doc["train_period_exact"]))
    return spec


def save_weights(path, w: WeightMatrix) -> None:
    header = {"kind": "weights", "C": w.n_channels, "K": w.k_taps, "center_index": w.center_index,
              **_period_fields(w.period)}
    _write_array(path, header, w.taps)


def load_weights(path) -> WeightMatrix:
    header, taps = _read_array(path, "weights", ("C", "K"))
    try:
        return WeightMatrix(taps, int(header["center_index"]), _read_period(header))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_mask(path, mask: MaskSource) -> None:
    if mask.kind != "file":
        raise ValueError("only per-frame (J x C x M) masks have a file form")
    J, C, M = mask.payload.shape
    _write_array(path, {"kind": "mask", "J": J, "C": C, "M": M}, mask.payload)


def load_mask(path) -> MaskSource:
    _, data = _read_array(path, "mask", ("J", "C", "M"))
    try:
        return MaskSource("file", data)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_features(path, X: FeatureMap) -> None:
    header = {"kind": "features", "C": X.n_channels, "M": X.n_frames, **_period_fields(X.frame_period)}
    _write_array(path, header, X.values)


def load_features(path) -> FeatureMap:
    header, values = _read_array(path, "features", ("C", "M"))
    try:
        return FeatureMap(values, _read_period(header))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc

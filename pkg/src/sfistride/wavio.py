"""WAV reading and writing (16-bit PCM and 32-bit float only)."""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Literal

import numpy as np
from scipy.io import wavfile

from .interp import SignalBuffer

__all__ = ["WavFormatError", "read_wav", "write_wav"]

WavFormat = Literal["pcm16", "float32"]


class WavFormatError(ValueError):
    """The file is not a WAV file this package can read."""


def read_wav(path) -> SignalBuffer:
    """Read a WAV file as a mono buffer.

    Multichannel files are averaged.  16-bit samples are scaled by 1/32768;
    32-bit float samples are taken as they are.
    """
    try:
        with warnings.catch_warnings():
            # unknown chunks are skipped with a warning; treat it as noise
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except (ValueError, EOFError) as exc:
        raise WavFormatError(f"{path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise WavFormatError(f"{path}: unsupported sample format {data.dtype}; expected 16-bit PCM or 32-bit float")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if rate <= 0:
        raise WavFormatError(f"{path}: invalid sampling rate {rate}")
    return SignalBuffer(samples, Fraction(1, int(rate)))


def write_wav(path, x: SignalBuffer, fmt: WavFormat = "float32") -> None:
    """Write ``x`` as mono WAV.  ``pcm16`` rounds and saturates to the int16 range."""
    rate = x.rate
    if rate.denominator != 1:
        raise ValueError(f"WAV files need an integer sampling rate, got {rate} Hz")
    if fmt == "float32":
        data = x.samples.astype(np.float32)
    elif fmt == "pcm16":
        data = np.clip(np.round(x.samples * 32768.0), -32768, 32767).astype(np.int16)
    else:
        raise ValueError(f"unknown WAV format {fmt!r}")
    wavfile.write(path, int(rate), data)

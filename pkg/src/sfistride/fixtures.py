"""Deterministic filterbank and test signal used by the benchmarks.

Without a trained model the reconstruction quality of encode/decode depends
entirely on the filterbank.  The bank here is built so that the chain is
linear despite the ReLU: every center frequency carries four phases
``0, pi/2, pi, 3pi/2``, and since ``relu(a) - relu(-a) = a`` each opposite
pair reconstructs the un-rectified response.  Centers sit every 200 Hz, the
reciprocal of the 5 ms kernel, so the frames tile time and frequency.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .filters import AnalogFilterParams, FilterBankSpec
from .interp import SignalBuffer

__all__ = [
    "TRAIN_RATE",
    "BENCH_RATES",
    "quad_phase_bank",
    "harmonic_mixture",
]

TRAIN_RATE = 32000
BENCH_RATES = (11025, 16538, 22050, 44100)

_PHASES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
_FUNDAMENTALS = (220.0, 329.63)


def quad_phase_bank(n_centers: int = 16, spacing_hz: float = 200.0, time_width: float = 1.5e-3,
                    kernel_duration=Fraction(1, 200), stride_duration=Fraction(1, 400),
                    train_rate: int = TRAIN_RATE) -> FilterBankSpec:
    """``4 * n_centers`` modulated Gaussians, four phases per center.

    ``time_width`` is the standard deviation of the Gaussian envelope in
    seconds, i.e. ``sigma = 1 / time_width``.
    """
    if n_centers < 1:
        raise ValueError("need at least one center")
    if not (spacing_hz > 0 and time_width > 0):
        raise ValueError("spacing and width must be positive")
    sigma = 1.0 / time_width
    filters = [AnalogFilterParams(2 * math.pi * spacing_hz * i, sigma, phi)
               for i in range(n_centers) for phi in _PHASES]
    return FilterBankSpec(filters, kernel_duration, stride_duration, Fraction(1, train_rate))


def harmonic_mixture(rate, duration: float = 1.0, seed: int = 0, f_max: float = 2700.0,
                     fade: float = 0.02) -> SignalBuffer:
    """Two harmonic tones (220 Hz and 329.63 Hz) with equal-amplitude partials up to ``f_max``.

    Partial phases are drawn from ``seed``.  The same seed gives the same
    continuous-time signal at every rate.  Raised-cosine fades of ``fade``
    seconds keep the edges away from the unpadded layer boundaries.
    """
    rate = Fraction(rate)
    if rate <= 0 or duration <= 0:
        raise ValueError("rate and duration must be positive")
    if f_max >= rate / 2:
        raise ValueError(f"f_max={f_max} Hz is not below the Nyquist frequency of {float(rate)} Hz")
    rng = np.random.default_rng(seed)
    n = int(duration * rate)
    t = np.arange(n) / float(rate)
    s = np.zeros(n)
    for f0 in _FUNDAMENTALS:
        for h in range(1, int(f_max // f0) + 1):
            s += np.sin(2 * np.pi * f0 * h * t + rng.uniform(0, 2 * np.pi))
    nf = min(int(fade * rate), n // 2)
    if nf > 0:
        ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(nf) / nf)
        s[:nf] *= ramp
        s[n - nf :] *= ramp[::-1]
    peak = np.max(np.abs(s)) if n else 0.0
    if peak > 0:
        s *= 0.5 / peak
    return SignalBuffer(s, 1 / rate)

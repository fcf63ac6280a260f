"""Helpers for moving between float periods and exact rationals."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

# sampling rates are integers or have tiny denominators (e.g. 33075/2); a float
# period round-trips to its rate within a few ulp
_MAX_RATE_DEN = 1000
_RATE_RTOL = 1e-14
_MAX_DURATION_DEN = 10**7
_DURATION_RTOL = 1e-12


def rationalize(value, max_den: int = _MAX_DURATION_DEN, rtol: float = _DURATION_RTOL) -> Fraction:
    """Return ``value`` as a Fraction, recovering the intended ratio of a float.

    Raises ``ValueError`` if no fraction with denominator ``<= max_den`` lies
    within ``rtol`` of ``value``.
    """
    if isinstance(value, Rational):
        return Fraction(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot rationalize non-finite value {value!r}")
    frac = Fraction(value).limit_denominator(max_den)
    if abs(float(frac) - value) > rtol * abs(value):
        raise ValueError(f"{value!r} is not close to a rational with denominator <= {max_den}")
    return frac


def rate_from_period(period) -> Fraction:
    """Exact sampling rate (Hz) of a period given in seconds."""
    if isinstance(period, Rational):
        if period <= 0:
            raise ValueError("period must be positive")
        return 1 / Fraction(period)
    period = float(period)
    if not (period > 0 and math.isfinite(period)):
        raise ValueError("period must be positive and finite")
    return rationalize(1.0 / period, _MAX_RATE_DEN, _RATE_RTOL)


def period_from_rate(rate) -> Fraction:
    rate = rationalize(rate, _MAX_RATE_DEN, _RATE_RTOL)
    if rate <= 0:
        raise ValueError("sampling rate must be positive")
    return 1 / rate


def round_half_away(value: Fraction) -> int:
    """Round to the nearest integer, ties away from zero, exactly."""
    value = Fraction(value)
    if value >= 0:
        return math.floor(value + Fraction(1, 2))
    return -math.floor(-value + Fraction(1, 2))

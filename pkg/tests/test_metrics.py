import warnings

import numpy as np
import pytest

from sfistride.interp import SignalBuffer
from sfistride.metrics import SI_SNR_CAP_DB, DegenerateSourcesWarning, least_squares_scales, si_snr


def test_si_snr_cap_for_perfect_and_scaled_estimates():
    ref = np.sin(np.linspace(0, 20, 500))
    assert si_snr(ref, ref) == SI_SNR_CAP_DB
    assert si_snr(2 * ref, ref) == SI_SNR_CAP_DB


def test_si_snr_orthogonal_noise_of_equal_norm_is_zero_db():
    ref = np.array([1.0, 0.0, 1.0, 0.0])
    noise = np.array([0.0, 1.0, 0.0, 1.0])
    assert si_snr(ref + noise, ref) == pytest.approx(0.0, abs=1e-12)


def test_si_snr_accepts_buffers():
    ref = SignalBuffer([1.0, 2.0, 3.0], 1.0)
    est = SignalBuffer([1.0, 2.0, 3.5], 1.0)
    assert si_snr(est, ref) == si_snr(est.samples, ref.samples)


def test_si_snr_errors():
    with pytest.raises(ValueError):
        si_snr(np.ones(3), np.zeros(3))
    with pytest.raises(ValueError):
        si_snr(np.ones(3), np.ones(4))


def test_si_snr_zero_estimate_is_negative_cap():
    assert si_snr(np.zeros(3), np.ones(3)) == -SI_SNR_CAP_DB


def test_si_snr_scale_invariance():
    rng = np.random.default_rng(4)
    ref = rng.standard_normal(1000)
    est = ref + 0.3 * rng.standard_normal(1000)
    base = si_snr(est, ref)
    for c in (1e-6, -0.5, 3.0, 1e6):
        assert abs(si_snr(c * est, ref) - base) <= 1e-9


def test_least_squares_single_source():
    rng = np.random.default_rng(5)
    x, s = rng.standard_normal(64), rng.standard_normal(64)
    assert least_squares_scales(x, [s])[0] == pytest.approx(np.dot(x, s) / np.dot(s, s), rel=1e-13)


def test_least_squares_orthogonal_recovery():
    s1 = np.array([1.0, 1.0, 0.0, 0.0])
    s2 = np.array([0.0, 0.0, 1.0, -1.0])
    np.testing.assert_allclose(least_squares_scales(3 * s1 - 2 * s2, [s1, s2]), [3.0, -2.0], rtol=1e-14)


def test_least_squares_matches_lstsq_and_residual_is_orthogonal():
    rng = np.random.default_rng(6)
    S = rng.standard_normal((3, 200))
    x = rng.standard_normal(200)
    alpha = least_squares_scales(x, list(S))
    oracle, *_ = np.linalg.lstsq(S.T, x, rcond=None)
    np.testing.assert_allclose(alpha, oracle, rtol=1e-10)
    resid = x - alpha @ S
    for s in S:
        assert abs(np.dot(resid, s)) <= 1e-9 * np.linalg.norm(resid) * np.linalg.norm(s)


def test_least_squares_degenerate_sources_warn():
    s = np.array([1.0, 2.0, 3.0])
    with pytest.warns(DegenerateSourcesWarning):
        alpha = least_squares_scales(2 * s, [s, s])
    np.testing.assert_allclose(alpha, [1.0, 1.0], rtol=1e-12)


def test_least_squares_no_warning_when_regular():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        least_squares_scales(np.ones(3), [np.array([1.0, 0.0, 0.0])])


def test_least_squares_length_mismatch():
    with pytest.raises(ValueError):
        least_squares_scales(np.ones(3), [np.ones(4)])

"""Scale-invariant SNR and least-squares source scaling."""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np

from .interp import SignalBuffer

__all__ = ["SI_SNR_CAP_DB", "DegenerateSourcesWarning", "si_snr", "least_squares_scales"]

#: finite stand-in for +inf (and -inf) so tabular output stays numeric
SI_SNR_CAP_DB = 300.0


class DegenerateSourcesWarning(RuntimeWarning):
    """The source Gram matrix is singular; a minimum-norm solution was used."""


def _as_array(x) -> np.ndarray:
    if isinstance(x, SignalBuffer):
        return x.samples
    return np.asarray(x, dtype=np.float64).reshape(-1)


def si_snr(est, ref) -> float:
    """SI-SNR in dB of ``est`` against ``ref`` (no mean removal).

    The reference is scaled by its projection coefficient
    ``<est, ref> / <ref, ref>``; the result is clipped to +-300 dB.
    """
    e, r = _as_array(est), _as_array(ref)
    if e.shape != r.shape:
        raise ValueError(f"length mismatch: {e.shape[0]} vs {r.shape[0]}")
    ref_energy = float(np.dot(r, r))
    if ref_energy == 0.0:
        raise ValueError("reference signal is identically zero")
    alpha = float(np.dot(e, r)) / ref_energy
    target = alpha * r
    resid = e - target
    num = float(np.dot(target, target))
    den = float(np.dot(resid, resid))
    # no projection onto the reference (including est = 0) scores the floor
    if num == 0.0:
        return -SI_SNR_CAP_DB
    if den == 0.0:
        return SI_SNR_CAP_DB
    return float(np.clip(10.0 * np.log10(num / den), -SI_SNR_CAP_DB, SI_SNR_CAP_DB))


def least_squares_scales(mixture, sources: Sequence) -> np.ndarray:
    """Scales ``alpha`` minimizing ``||x - sum_j alpha_j s_j||^2``.

    Solves the J x J normal equations.  A singular Gram matrix falls back to
    the minimum-norm solution and emits :class:`DegenerateSourcesWarning`.
    """
    x = _as_array(mixture)
    S = np.stack([_as_array(s) for s in sources])
    if S.shape[1] != x.shape[0]:
        raise ValueError("sources and mixture differ in length")
    gram = S @ S.T
    rhs = S @ x
    rank = np.linalg.matrix_rank(gram)
    if rank < gram.shape[0]:
        warnings.warn("source Gram matrix is singular; using minimum-norm scales", DegenerateSourcesWarning,
                      stacklevel=2)
        return np.linalg.pinv(gram, hermitian=True) @ rhs
    return np.linalg.solve(gram, rhs)

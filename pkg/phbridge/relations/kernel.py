"""Rank-revealing numerics shared by every other module.

All subspace bases produced here are orthonormal and sign-canonical: the
largest-magnitude entry of each column is real and positive, so repeated
calls on the same input give bit-identical bases.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg as spla

from phbridge.core.errors import InvalidMatrix, ShapeError
from phbridge.core.tolerance import TolerancePolicy, default_policy

logger = logging.getLogger(__name__)


class RankFactor(NamedTuple):
    range_basis: np.ndarray
    null_basis: np.ndarray
    rank: int


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float or complex array.

    Integer and boolean inputs are promoted to float; complex input stays
    complex.  1-D input is not reshaped; callers decide row vs column.
    """
    arr = np.asarray(a)
    if arr.dtype.kind in "biu":
        arr = arr.astype(float)
    elif arr.dtype.kind not in "fc":
        raise InvalidMatrix(f"{name} has non-numeric dtype {arr.dtype}")
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} contains non-finite entries")
    return arr


def as_vector(v, size: int, *, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v)
    if arr.dtype.kind in "biu":
        arr = arr.astype(float)
    arr = arr.reshape(-1)
    if arr.shape[0] != size:
        raise ShapeError(f"{name} has length {arr.shape[0]}, expected {size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} contains non-finite entries")
    return arr


def result_dtype(*arrays: np.ndarray) -> np.dtype:
    """``complex128`` if any operand is complex, else ``float64``."""
    if any(np.iscomplexobj(a) for a in arrays):
        return np.dtype(complex)
    return np.dtype(float)


def herm(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def canonicalize_columns(basis: np.ndarray) -> np.ndarray:
    """Fix the phase of each column so its largest entry is real positive."""
    if basis.size == 0:
        return basis
    out = basis.copy()
    pivots = np.argmax(np.abs(out), axis=0)
    phases = out[pivots, np.arange(out.shape[1])]
    phases = phases / np.abs(phases)
    out /= phases[np.newaxis, :]
    return out


def _split(a: np.ndarray, tol: TolerancePolicy):
    """Full SVD split of ``a``: (range, left null, right null, rank)."""
    rows, cols = a.shape
    dtype = result_dtype(a)
    if a.size == 0:
        return (
            np.zeros((rows, 0), dtype=dtype),
            np.eye(rows, dtype=dtype),
            np.eye(cols, dtype=dtype),
            0,
        )
    u, s, vh = spla.svd(a, full_matrices=True, check_finite=False)
    sigma_max = s[0] if s.size else 0.0
    cutoff = tol.threshold(sigma_max, rows, cols)
    rank = int(np.count_nonzero(s > cutoff))
    v = herm(vh)
    return u[:, :rank], u[:, rank:], v[:, rank:], rank


def rank_factor(a, tol: TolerancePolicy | None = None) -> RankFactor:
    """Orthonormal range and null-space bases of ``a`` and its numerical rank.

    Raises:
        InvalidMatrix: ``a`` has NaN or Inf entries.
    """
    tol = tol or default_policy()
    a = as_matrix(a)
    rng, _, null, rank = _split(a, tol)
    return RankFactor(canonicalize_columns(rng), canonicalize_columns(null), rank)


def left_null(a: np.ndarray, tol: TolerancePolicy | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of ``{v : v* a = 0}``."""
    tol = tol or default_policy()
    _, lnull, _, _ = _split(as_matrix(a), tol)
    return canonicalize_columns(lnull)


def orth(a: np.ndarray, tol: TolerancePolicy | None = None) -> np.ndarray:
    return rank_factor(a, tol).range_basis


def null(a: np.ndarray, tol: TolerancePolicy | None = None) -> np.ndarray:
    return rank_factor(a, tol).null_basis


def pseudo_inverse(a, tol: TolerancePolicy | None = None) -> np.ndarray:
    """Moore–Penrose inverse with the rank decided by ``tol``."""
    tol = tol or default_policy()
    a = as_matrix(a)
    rows, cols = a.shape
    if a.size == 0:
        return np.zeros((cols, rows), dtype=a.dtype)
    u, s, vh = spla.svd(a, full_matrices=False, check_finite=False)
    cutoff = tol.threshold(s[0], rows, cols)
    keep = s > cutoff
    return herm(vh[keep]) @ (herm(u[:, keep]) / s[keep][:, np.newaxis])


def projector(basis: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the span of orthonormal ``basis`` columns."""
    return basis @ herm(basis)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + herm(a)) / 2


def skew_part(a: np.ndarray) -> np.ndarray:
    return (a - herm(a)) / 2


def eig_extremes(a: np.ndarray) -> tuple[float, float]:
    """(min, max) eigenvalue of the Hermitian part of square ``a``; (0, 0) if empty."""
    if a.size == 0:
        return 0.0, 0.0
    w = spla.eigvalsh(hermitian_part(a), check_finite=False)
    return float(w[0]), float(w[-1])


def spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root after clipping negative eigenvalues to 0."""
    if a.size == 0:
        return a.copy()
    w, v = spla.eigh(hermitian_part(a), check_finite=False)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ herm(v)

"""Regularity of matrix pencils and positive-real sampling of transfer functions."""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel

from phbridge.core.config import settings
from phbridge.core.errors import InvalidParameter, IrregularPencil, ShapeError, SingularShift
from phbridge.core.tolerance import TolerancePolicy, default_policy
from phbridge.relations.kernel import as_matrix, eig_extremes, herm, rank_factor, spectral_norm
from phbridge.systems.descriptor import DescriptorPH

logger = logging.getLogger(__name__)


class PencilReport(BaseModel):
    size: int
    regular: bool
    method: str
    shifts_tested: int
    kernel_test: bool | None = None


class PositiveRealReport(BaseModel):
    points: list[tuple[float, float]]
    min_eigs: list[float]
    min_eig: float
    passed: bool


def _nonsingular(a: np.ndarray, tol: TolerancePolicy) -> bool:
    s = spla.svdvals(a, check_finite=False)
    return bool(s[-1] > tol.threshold(s[0], *a.shape))


def _qz_singular(e: np.ndarray, a: np.ndarray, tol: TolerancePolicy) -> bool:
    """A generalized Schur pair with a ``0/0`` diagonal entry marks a singular pencil."""
    aa, bb, _, _ = spla.qz(a.astype(complex), e.astype(complex), output="complex")
    scale = max(spectral_norm(a), spectral_norm(e), 1.0)
    cutoff = tol.threshold(scale, *a.shape)
    both_zero = (np.abs(np.diag(aa)) <= cutoff) & (np.abs(np.diag(bb)) <= cutoff)
    return bool(np.any(both_zero))


def _kernel_test(e: np.ndarray, a: np.ndarray, tol: TolerancePolicy) -> bool | None:
    """``ker E ∩ ker A = {0}``, reported only where it is equivalent to regularity."""
    e_min, _ = eig_extremes(e)
    _, a_max = eig_extremes(a)
    if spectral_norm(e - herm(e)) > tol.check or e_min < -tol.check or a_max > tol.check:
        return None
    return rank_factor(np.vstack([e, a]), tol).rank == e.shape[0]


def pencil_regular(
    E, A, tol: TolerancePolicy | None = None, seed: int | None = None
) -> PencilReport:
    """Whether ``det(λE - A)`` is not identically zero.

    Regular as soon as ``λE - A`` is nonsingular at one of the random complex
    shifts; singular only if every shift fails and the QZ decomposition shows
    a ``0/0`` pair.

    Raises:
        ShapeError: ``E`` and ``A`` are not square matrices of the same size.
    """
    tol = tol or default_policy()
    e, a = as_matrix(E, name="E"), as_matrix(A, name="A")
    if e.shape != a.shape or e.shape[0] != e.shape[1]:
        raise ShapeError(f"pencil needs square matrices of one size, got {e.shape} and {a.shape}")
    n = e.shape[0]
    if n == 0:
        return PencilReport(size=0, regular=True, method="empty", shifts_tested=0, kernel_test=True)
    kernel = _kernel_test(e, a, tol)

    rng = np.random.default_rng(settings.seed if seed is None else seed)
    shifts = rng.standard_normal(settings.pencil_shifts) + 1j * rng.standard_normal(
        settings.pencil_shifts
    )
    for tested, lam in enumerate(shifts, start=1):
        if _nonsingular(lam * e - a, tol):
            logger.debug("pencil regular at shift %d (λ=%s)", tested, lam)
            return PencilReport(
                size=n, regular=True, method="shift", shifts_tested=tested, kernel_test=kernel
            )

    singular = _qz_singular(e, a, tol)
    if not singular:
        logger.warning("all %d shifts singular but QZ finds no 0/0 pair", len(shifts))
    return PencilReport(
        size=n, regular=not singular, method="qz", shifts_tested=len(shifts), kernel_test=kernel
    )


def transfer_function(dsys: DescriptorPH, s: complex) -> np.ndarray:
    """``G(s) = (B+P)* Q (sE - (J-R)Q)⁻¹ (B-P) + S + N``.

    Raises:
        SingularShift: ``s`` is an eigenvalue of the pencil.
    """
    pencil = s * dsys.E - dsys.A
    if dsys.n and not _nonsingular(pencil, dsys.tol):
        raise SingularShift(f"s = {s} is an eigenvalue of the pencil (sE - (J-R)Q)")
    if dsys.n:
        solved = spla.solve(pencil, dsys.input_matrix.astype(complex), check_finite=False)
    else:
        solved = np.zeros((0, dsys.m), dtype=complex)
    return dsys.output_matrix @ solved + dsys.feedthrough


def sample_points(count: int, seed: int | None = None) -> list[complex]:
    """``count`` seeded points in the open right half plane."""
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    re = np.abs(rng.standard_normal(count)) + 1e-3
    im = 3.0 * rng.standard_normal(count)
    return [complex(x, y) for x, y in zip(re, im)]


def transfer_positive_real(
    dsys: DescriptorPH,
    points: list[complex] | None = None,
    count: int = 100,
    seed: int | None = None,
    tol: float | None = None,
) -> PositiveRealReport:
    """Minimum eigenvalue of ``G(s) + G(s)*`` at points with ``Re s > 0``.

    Raises:
        IrregularPencil: ``(E, (J-R)Q)`` is singular.
        InvalidParameter: a point has ``Re s ≤ 0``.
        SingularShift: a point is a pencil eigenvalue.
    """
    tol = dsys.tol.check if tol is None else tol
    points = sample_points(count, seed) if points is None else [complex(s) for s in points]
    bad = [s for s in points if s.real <= 0]
    if bad:
        raise InvalidParameter(f"positive-real sampling needs Re s > 0, got {bad[0]}")
    if not pencil_regular(dsys.E, dsys.A, dsys.tol, seed).regular:
        raise IrregularPencil("pencil (E, (J-R)Q) is singular")

    min_eigs = []
    for s in points:
        g = transfer_function(dsys, s)
        lo, _ = eig_extremes(g)
        # eig_extremes takes the Hermitian part, so lo is λ_min(G + G*) / 2.
        min_eigs.append(2 * lo)
    worst = min(min_eigs, default=0.0)
    return PositiveRealReport(
        points=[(s.real, s.imag) for s in points],
        min_eigs=min_eigs,
        min_eig=worst,
        passed=worst >= -tol,
    )

"""Structure classes of relations in ``Kⁿ × Kⁿ``.

Verdicts come from the Gram products of an orthonormal image basis
``[P; S]``: with ``Γ = S*P`` a relation is

- Lagrange   iff ``Γ = Γ*`` and ``dim = n``,
- Dirac      iff ``Γ = -Γ*`` and ``dim = n``,
- monotone   iff ``Γ + Γ* ⪰ 0``,
- resistive  iff ``Γ = Γ* ⪯ 0``,

and the maximal variants add ``dim = n``.  Because the basis is
orthonormal, absolute tolerances on these residuals are scale free.
"""

from __future__ import annotations

import logging

from pydantic import BaseModel

from phbridge.core.errors import ShapeError
from phbridge.relations.kernel import eig_extremes, herm, spectral_norm
from phbridge.relations.relation import LinearRelation

logger = logging.getLogger(__name__)


class StructureReport(BaseModel):
    n: int
    dim: int
    is_lagrange: bool
    is_dirac: bool
    is_resistive: bool
    is_max_resistive: bool
    is_monotone: bool
    is_max_monotone: bool
    dirac_constraints: int
    lagrange_constraints: int
    witness: dict[str, float]


class KernelStructureReport(BaseModel):
    """Verdicts read off a kernel representation ``ker[K, L]``.

    Only the classes that force ``dim = n`` are decidable from ``[K, L]``
    alone, so this report carries the four maximal verdicts.
    """

    n: int
    dim: int
    is_lagrange: bool
    is_dirac: bool
    is_max_resistive: bool
    is_max_monotone: bool
    witness: dict[str, float]


def _require_square(rel: LinearRelation) -> int:
    if rel.n_left != rel.n_right:
        raise ShapeError(
            f"structure classes need K^n×K^n, got K^{rel.n_left}×K^{rel.n_right}"
        )
    return rel.n_left


def algebraic_constraints(rel: LinearRelation) -> tuple[int, int]:
    """``(dim ker A, n - dim dom A)``.

    The first number counts Dirac-type algebraic constraints (pairs
    ``(f, 0)`` with ``f ≠ 0``), the second Lagrange-type constraints (the
    first block ``P`` of ``ran[P; S]`` is singular).
    """
    parts = rel.parts()
    return parts.ker.shape[1], rel.n_left - parts.dom.shape[1]


def classify(rel: LinearRelation, tol: float | None = None) -> StructureReport:
    n = _require_square(rel)
    tol = rel.tol.check if tol is None else tol
    p, s = rel.first, rel.second
    gram = herm(s) @ p

    hermitian_defect = spectral_norm(gram - herm(gram))
    skew_defect = spectral_norm(gram + herm(gram))
    min_eig, max_eig = eig_extremes(gram)
    full = rel.dim == n

    symmetric = hermitian_defect <= tol
    monotone = min_eig >= -tol
    resistive = symmetric and max_eig <= tol
    dirac_c, lagrange_c = algebraic_constraints(rel)

    report = StructureReport(
        n=n,
        dim=rel.dim,
        is_lagrange=symmetric and full,
        is_dirac=skew_defect <= tol and full,
        is_resistive=resistive,
        is_max_resistive=resistive and full,
        is_monotone=monotone,
        is_max_monotone=monotone and full,
        dirac_constraints=dirac_c,
        lagrange_constraints=lagrange_c,
        witness={
            "hermitian_defect": hermitian_defect,
            "skew_defect": skew_defect,
            "min_eig_hermitian_part": min_eig,
            "max_eig_hermitian_part": max_eig,
        },
    )
    logger.debug("classify: %s", report)
    return report


def classify_kernel(rel: LinearRelation, tol: float | None = None) -> KernelStructureReport:
    """Maximal-class verdicts from ``[K, L]``.

    ``ker[K, L]`` is Lagrange iff ``KL* = LK*``, Dirac iff ``KL* = -LK*``,
    maximal monotone iff ``KL* + LK* ⪯ 0`` and maximal resistive iff
    ``KL* = LK* ⪰ 0``, always together with ``dim = n``.
    """
    n = _require_square(rel)
    tol = rel.tol.check if tol is None else tol
    k, l = rel.kernel_representation()
    cross = k @ herm(l)

    hermitian_defect = spectral_norm(cross - herm(cross))
    skew_defect = spectral_norm(cross + herm(cross))
    min_eig, max_eig = eig_extremes(cross)
    full = rel.dim == n
    symmetric = hermitian_defect <= tol

    return KernelStructureReport(
        n=n,
        dim=rel.dim,
        is_lagrange=symmetric and full,
        is_dirac=skew_defect <= tol and full,
        is_max_resistive=symmetric and min_eig >= -tol and full,
        is_max_monotone=max_eig <= tol and full,
        witness={
            "hermitian_defect": hermitian_defect,
            "skew_defect": skew_defect,
            "min_eig_hermitian_part": min_eig,
            "max_eig_hermitian_part": max_eig,
        },
    )


def is_structured(rel: LinearRelation, flavor: str, tol: float | None = None) -> bool:
    """Maximal verdict for a :class:`~phbridge.core.kinds.GraphFlavor` value."""
    report = classify(rel, tol)
    return {
        "dirac": report.is_dirac,
        "lagrange": report.is_lagrange,
        "max_resistive": report.is_max_resistive,
        "max_monotone": report.is_max_monotone,
    }[str(flavor)]

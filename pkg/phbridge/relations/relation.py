"""Linear relations: subspaces of ``K^n_left × K^n_right``.

A relation is stored twice, as an orthonormal image basis (columns spanning
the subspace) and as an orthonormal kernel basis (rows annihilating it).
Both are computed once at construction and never mutated.

Elements are stacked column vectors ``[first; second]``.  For the
structures of a port-Hamiltonian system the first factor is the flow side
and the second factor the effort side.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from phbridge.core.errors import InvalidMatrix, ShapeError
from phbridge.core.tolerance import TolerancePolicy, default_policy
from phbridge.relations.kernel import (
    _split,
    as_matrix,
    as_vector,
    canonicalize_columns,
    herm,
    orth,
    projector,
    spectral_norm,
)

logger = logging.getLogger(__name__)


class RelationParts(NamedTuple):
    """Orthonormal bases of ``ker``, ``dom`` (first factor), ``mul``, ``ran`` (second factor)."""

    ker: np.ndarray
    dom: np.ndarray
    mul: np.ndarray
    ran: np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class LinearRelation:
    n_left: int
    n_right: int
    image_basis: np.ndarray
    kernel_basis: np.ndarray
    tol: TolerancePolicy = field(default_factory=default_policy)

    def __post_init__(self) -> None:
        ambient = self.n_left + self.n_right
        if self.image_basis.shape[0] != ambient:
            raise ShapeError(
                f"image basis has {self.image_basis.shape[0]} rows, expected {ambient}"
            )
        if self.kernel_basis.shape[1] != ambient:
            raise ShapeError(
                f"kernel basis has {self.kernel_basis.shape[1]} columns, expected {ambient}"
            )
        if self.image_basis.shape[1] + self.kernel_basis.shape[0] != ambient:
            raise ShapeError("image and kernel bases do not have complementary sizes")
        object.__setattr__(self, "image_basis", _frozen(self.image_basis))
        object.__setattr__(self, "kernel_basis", _frozen(self.kernel_basis))

    # ------------------------------------------------------------------
    # Basic properties
    # ------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.image_basis.shape[1]

    @property
    def ambient(self) -> int:
        return self.n_left + self.n_right

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.image_basis)

    @property
    def first(self) -> np.ndarray:
        """First-factor block ``X₁`` of the image basis."""
        return self.image_basis[: self.n_left]

    @property
    def second(self) -> np.ndarray:
        """Second-factor block ``X₂`` of the image basis."""
        return self.image_basis[self.n_left :]

    def projector(self) -> np.ndarray:
        return projector(self.image_basis)

    def __repr__(self) -> str:
        field_name = "complex" if self.is_complex else "real"
        return (
            f"LinearRelation(n_left={self.n_left}, n_right={self.n_right}, "
            f"dim={self.dim}, field={field_name})"
        )

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_image(
        cls, generators, n_left: int, n_right: int, tol: TolerancePolicy | None = None
    ) -> LinearRelation:
        """Column span of ``generators`` (``(n_left + n_right) × k``)."""
        tol = tol or default_policy()
        fg = as_matrix(generators, name="image generators")
        if fg.shape[0] != n_left + n_right:
            raise ShapeError(
                f"image generators have {fg.shape[0]} rows, expected {n_left + n_right}"
            )
        rng, lnull, _, rank = _split(fg, tol)
        logger.debug("from_image: %d generators, rank %d", fg.shape[1], rank)
        return cls(
            n_left=n_left,
            n_right=n_right,
            image_basis=canonicalize_columns(rng),
            kernel_basis=herm(canonicalize_columns(lnull)),
            tol=tol,
        )

    @classmethod
    def from_kernel(
        cls, annihilator, n_left: int, n_right: int, tol: TolerancePolicy | None = None
    ) -> LinearRelation:
        """Null space of ``annihilator = [K, L]`` (``k × (n_left + n_right)``)."""
        tol = tol or default_policy()
        kl = as_matrix(annihilator, name="kernel matrix")
        if kl.shape[1] != n_left + n_right:
            raise ShapeError(
                f"kernel matrix has {kl.shape[1]} columns, expected {n_left + n_right}"
            )
        _, _, null, _ = _split(kl, tol)
        return cls.from_image(null, n_left, n_right, tol)

    @classmethod
    def from_bases(
        cls, image, kernel, n_left: int, n_right: int, tol: TolerancePolicy | None = None
    ) -> LinearRelation:
        """Relation holding ``image`` and ``kernel`` exactly as given.

        Raises:
            InvalidMatrix: the bases are not orthonormal or do not annihilate
                each other within ``tol.check``.
        """
        tol = tol or default_policy()
        image = as_matrix(image, name="image basis")
        kernel = as_matrix(kernel, name="kernel basis")
        rel = cls(n_left=n_left, n_right=n_right, image_basis=image, kernel_basis=kernel, tol=tol)
        defects = {
            "image orthonormality": spectral_norm(herm(image) @ image - np.eye(rel.dim)),
            "kernel orthonormality": spectral_norm(
                kernel @ herm(kernel) - np.eye(kernel.shape[0])
            ),
            "annihilation": spectral_norm(kernel @ image),
        }
        for name, defect in defects.items():
            if defect > tol.check:
                raise InvalidMatrix(f"relation bases fail {name} ({defect:.3e})")
        return rel

    # ------------------------------------------------------------------
    # Calculus
    # ------------------------------------------------------------------

    def parts(self) -> RelationParts:
        """Kernel, domain, multivalued part and range as orthonormal bases."""
        x1, x2 = self.first, self.second
        _, _, null2, _ = _split(x2, self.tol)
        _, _, null1, _ = _split(x1, self.tol)
        return RelationParts(
            ker=orth(x1 @ null2, self.tol),
            dom=orth(x1, self.tol),
            mul=orth(x2 @ null1, self.tol),
            ran=orth(x2, self.tol),
        )

    def inverse(self) -> LinearRelation:
        """``{(e, f) : (f, e) ∈ A}``; swaps the two factors."""
        n = self.n_left
        return LinearRelation(
            n_left=self.n_right,
            n_right=self.n_left,
            image_basis=np.vstack([self.image_basis[n:], self.image_basis[:n]]),
            kernel_basis=np.hstack([self.kernel_basis[:, n:], self.kernel_basis[:, :n]]),
            tol=self.tol,
        )

    def adjoint(self) -> LinearRelation:
        """``{(e', f') : ⟨f', e⟩ = ⟨e', f⟩ for all (e, f) ∈ A}``.

        With ``A = ker[K, L]`` the adjoint is ``ran[L*; -K*]``; with
        ``A = ran[X₁; X₂]`` it is ``ker[-X₂*, X₁*]``.  Both bases stay
        orthonormal, so no factorization is needed.
        """
        n = self.n_left
        k, l = self.kernel_basis[:, :n], self.kernel_basis[:, n:]
        return LinearRelation(
            n_left=self.n_right,
            n_right=self.n_left,
            image_basis=np.vstack([herm(l), -herm(k)]),
            kernel_basis=np.hstack([-herm(self.second), herm(self.first)]),
            tol=self.tol,
        )

    def scale(self, alpha: complex) -> LinearRelation:
        """``{(e, α f) : (e, f) ∈ A}``; ``α`` multiplies the second factor."""
        generators = np.vstack([self.first, alpha * self.second])
        return LinearRelation.from_image(generators, self.n_left, self.n_right, self.tol)

    def kernel_representation(self) -> tuple[np.ndarray, np.ndarray]:
        """``(K, L)`` with ``A = ker[K, L]`` and orthonormal rows."""
        return self.kernel_basis[:, : self.n_left], self.kernel_basis[:, self.n_left :]

    # ------------------------------------------------------------------
    # Metrics
    # ------------------------------------------------------------------

    def contains(self, pair) -> float:
        """Relative distance of ``pair`` from the relation.

        Returns ``‖(I − Π) pair‖ / max(1, ‖pair‖)``; the pair is a member iff
        the residual is at most ``tol`` (see :meth:`is_member`).
        """
        v = as_vector(pair, self.ambient, name="pair")
        residual = v - self.image_basis @ (herm(self.image_basis) @ v)
        return float(np.linalg.norm(residual) / max(1.0, np.linalg.norm(v)))

    def is_member(self, pair, tol: float | None = None) -> bool:
        return self.contains(pair) <= (self.tol.check if tol is None else tol)

    def residuals(self, pairs: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`contains` for a ``(samples, ambient)`` array."""
        pairs = np.atleast_2d(np.asarray(pairs))
        if pairs.shape[1] != self.ambient:
            raise ShapeError(f"pairs have width {pairs.shape[1]}, expected {self.ambient}")
        coords = pairs @ self.image_basis.conj()
        residual = pairs - coords @ self.image_basis.T
        norms = np.maximum(1.0, np.linalg.norm(pairs, axis=1))
        return np.linalg.norm(residual, axis=1) / norms

    def gap(self, other: LinearRelation) -> float:
        """``‖Π_A − Π_B‖₂``; zero iff the subspaces coincide."""
        if (self.n_left, self.n_right) != (other.n_left, other.n_right):
            raise ShapeError(
                f"gap between relations in K^{self.n_left}×K^{self.n_right} "
                f"and K^{other.n_left}×K^{other.n_right}"
            )
        return spectral_norm(self.projector() - other.projector())

    def contains_relation(self, other: LinearRelation, tol: float | None = None) -> bool:
        """True iff every image-basis column of ``other`` is a member."""
        if other.dim == 0:
            return True
        limit = self.tol.check if tol is None else tol
        return bool(np.max(self.residuals(other.image_basis.T)) <= limit)


# ── Module-level constructors ──────────────────────────────────────────────


def from_image(generators, n_left: int, n_right: int, tol: TolerancePolicy | None = None):
    return LinearRelation.from_image(generators, n_left, n_right, tol)


def from_kernel(annihilator, n_left: int, n_right: int, tol: TolerancePolicy | None = None):
    return LinearRelation.from_kernel(annihilator, n_left, n_right, tol)


def graph(a, tol: TolerancePolicy | None = None) -> LinearRelation:
    """``{(x, A x)} = ran[I; A]``."""
    a = as_matrix(a)
    rows, cols = a.shape
    return LinearRelation.from_image(
        np.vstack([np.eye(cols, dtype=a.dtype), a]), cols, rows, tol
    )


def inverse_graph(a, tol: TolerancePolicy | None = None) -> LinearRelation:
    """``{(A x, x)} = ran[A; I]``: flows given as a matrix times efforts."""
    a = as_matrix(a)
    rows, cols = a.shape
    return LinearRelation.from_image(
        np.vstack([a, np.eye(cols, dtype=a.dtype)]), rows, cols, tol
    )


def zero_relation(n_left: int, n_right: int, tol: TolerancePolicy | None = None):
    return LinearRelation.from_image(np.zeros((n_left + n_right, 0)), n_left, n_right, tol)


def full_relation(n_left: int, n_right: int, tol: TolerancePolicy | None = None):
    return LinearRelation.from_image(np.eye(n_left + n_right), n_left, n_right, tol)

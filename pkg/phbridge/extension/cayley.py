"""Cayley transform between monotone relations and contractions.

For a monotone relation ``M`` (pairs ``(e, f)`` with ``Re⟨e, f⟩ ≥ 0``) the
map ``e + f ↦ e - f`` is single valued and contractive, since
``‖e - f‖² = ‖e + f‖² - 4 Re⟨e, f⟩``.  The inverse transform of an
everywhere defined contraction ``T`` is ``ran[I + T; I - T]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from phbridge.core.errors import NotContraction, NotMonotone, PartialDomain
from phbridge.core.tolerance import TolerancePolicy, default_policy
from phbridge.relations.kernel import _split, canonicalize_columns, herm, pseudo_inverse, spectral_norm
from phbridge.relations.relation import LinearRelation
from phbridge.relations.structure import classify

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ContractionGraph:
    """A linear map ``V : dom V → Kⁿ`` with ``dom V ⊆ Kⁿ``.

    ``domain_basis`` is an orthonormal ``n × k`` basis of ``dom V`` and
    ``V_matrix`` (``n × k``) holds the images of those basis vectors.
    """

    domain_basis: np.ndarray
    V_matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.domain_basis.shape[0]

    @property
    def domain_dim(self) -> int:
        return self.domain_basis.shape[1]

    @property
    def everywhere_defined(self) -> bool:
        return self.domain_dim == self.n

    def operator(self) -> np.ndarray:
        """``V ∘ Π_{dom V}`` as an ``n × n`` matrix."""
        return self.V_matrix @ herm(self.domain_basis)

    def norm(self) -> float:
        return spectral_norm(self.V_matrix)


def _promote(rel: LinearRelation) -> np.ndarray:
    return rel.image_basis.astype(complex)


def cayley(rel: LinearRelation, tol: TolerancePolicy | None = None) -> ContractionGraph:
    """Graph ``{(e + f, e - f) : (e, f) ∈ M}`` of a monotone relation.

    Raises:
        NotMonotone: ``M`` fails the monotonicity test or its Cayley image is
            not single valued.
    """
    tol = tol or rel.tol
    report = classify(rel, tol.check)
    if not report.is_monotone:
        raise NotMonotone(
            "relation is not monotone (min eigenvalue of Gram form "
            f"{report.witness['min_eig_hermitian_part']:.3e})"
        )
    basis = _promote(rel)
    e, f = basis[: rel.n_left], basis[rel.n_left :]
    plus, minus = e + f, e - f

    domain, _, coeff_null, rank = _split(plus, tol)
    if coeff_null.size and spectral_norm(minus @ coeff_null) > tol.check:
        raise NotMonotone("Cayley image is multivalued")
    domain = canonicalize_columns(domain)
    v_matrix = minus @ pseudo_inverse(plus, tol) @ domain
    graph = ContractionGraph(domain_basis=domain, V_matrix=v_matrix)
    if graph.norm() > 1 + tol.check:
        raise NotMonotone(f"Cayley image has norm {graph.norm():.6f} > 1")
    logger.debug("cayley: dom V has dimension %d of %d", rank, rel.n_left)
    return graph


def inverse_cayley(
    graph: ContractionGraph, tol: TolerancePolicy | None = None
) -> LinearRelation:
    """Maximal monotone relation ``ran[I + T; I - T]`` of a contraction ``T``.

    Raises:
        PartialDomain: ``dom V`` is a proper subspace.
        NotContraction: ``‖V‖ > 1``.
    """
    tol = tol or default_policy()
    if not graph.everywhere_defined:
        raise PartialDomain(
            f"contraction defined on {graph.domain_dim} of {graph.n} dimensions"
        )
    if graph.norm() > 1 + tol.check:
        raise NotContraction(f"operator norm {graph.norm():.6f} exceeds 1")
    t = graph.operator()
    eye = np.eye(graph.n, dtype=t.dtype)
    return LinearRelation.from_image(np.vstack([eye + t, eye - t]), graph.n, graph.n, tol)


def extend_contraction(graph: ContractionGraph) -> ContractionGraph:
    """Everywhere defined extension ``V ∘ Π_{dom V}``; still contractive."""
    eye = np.eye(graph.n, dtype=graph.V_matrix.dtype)
    return ContractionGraph(domain_basis=eye, V_matrix=graph.operator())

"""Maximal monotone and maximal resistive extensions via the Cayley transform.

Real inputs are promoted to complex for the construction; the verified
result is demoted back to real when its imaginary part is negligible.
"""

from __future__ import annotations

import logging

import numpy as np

from phbridge.core.errors import ExtensionFailed, NotResistive
from phbridge.core.kinds import GraphFlavor
from phbridge.core.tolerance import TolerancePolicy
from phbridge.extension.cayley import ContractionGraph, cayley, extend_contraction, inverse_cayley
from phbridge.relations.kernel import hermitian_part, herm, null, pseudo_inverse
from phbridge.relations.relation import LinearRelation
from phbridge.relations.structure import classify, is_structured

logger = logging.getLogger(__name__)


def _finalize(
    extension: LinearRelation, source: LinearRelation, flavor: GraphFlavor, tol: TolerancePolicy
) -> LinearRelation:
    if not is_structured(extension, flavor, tol.check):
        witness = classify(extension, tol.check).witness
        raise ExtensionFailed(f"extension is not {flavor}: {witness}")
    if not extension.contains_relation(source, tol.check):
        raise ExtensionFailed("extension does not contain the input relation")

    if source.is_complex or not extension.is_complex:
        return extension
    # A conjugation-invariant subspace is spanned by the real and imaginary
    # parts of any of its bases.
    basis = extension.image_basis
    real = LinearRelation.from_image(
        np.hstack([basis.real, basis.imag]), extension.n_left, extension.n_right, tol
    )
    gap = real.gap(extension)
    if real.dim != extension.dim or gap > tol.check:
        logger.warning("extension of a real relation is not real (gap %.3e)", gap)
        raise ExtensionFailed(f"extension of a real relation is not real (gap {gap:.3e})")
    return real


def extend_maximal_monotone(
    rel: LinearRelation, tol: TolerancePolicy | None = None
) -> LinearRelation:
    """A maximal monotone relation containing ``rel``.

    The Cayley contraction ``V`` is extended by ``V ∘ Π_{dom V}`` and
    transformed back.

    Raises:
        NotMonotone: ``rel`` is not monotone.
    """
    tol = tol or rel.tol
    graph = cayley(rel, tol)
    if rel.dim == rel.n_left:
        return rel
    extension = inverse_cayley(extend_contraction(graph), tol)
    logger.debug("monotone extension: dim %d -> %d", rel.dim, extension.dim)
    return _finalize(extension, rel, GraphFlavor.MAX_MONOTONE, tol)


def hermitian_completion(graph: ContractionGraph, tol: TolerancePolicy) -> ContractionGraph:
    """Everywhere defined Hermitian contraction extending a Hermitian one.

    In the basis ``[Q, Q⊥]`` with ``Q`` spanning ``dom V`` the known column is
    ``[A; B]``; the completion is ``[[A, B*], [B, C]]`` with
    ``C = I - B (I - A)† B*``, the upper extreme of the admissible ``C``.
    """
    q = graph.domain_basis
    n = graph.n
    q_perp = null(herm(q), tol) if q.shape[1] else np.eye(n, dtype=complex)
    a = hermitian_part(herm(q) @ graph.V_matrix)
    b = herm(q_perp) @ graph.V_matrix
    eye_k = np.eye(a.shape[0], dtype=complex)
    eye_c = np.eye(q_perp.shape[1], dtype=complex)
    c = eye_c - b @ pseudo_inverse(eye_k - a, tol) @ herm(b)
    block = np.block([[a, herm(b)], [b, hermitian_part(c)]])
    basis = np.hstack([q, q_perp]).astype(complex)
    operator = basis @ block @ herm(basis)
    return ContractionGraph(domain_basis=np.eye(n, dtype=complex), V_matrix=operator)


def extend_maximal_resistive(
    rel: LinearRelation, tol: TolerancePolicy | None = None
) -> LinearRelation:
    """A maximal resistive relation containing ``rel``.

    ``-rel`` is monotone and symmetric, so its Cayley transform is Hermitian
    on its domain; a Hermitian contractive completion transformed back and
    negated is maximal resistive.

    Raises:
        NotResistive: ``rel`` is not resistive.
        ExtensionFailed: the completion fails post-verification.
    """
    tol = tol or rel.tol
    report = classify(rel, tol.check)
    if not report.is_resistive:
        raise NotResistive(f"relation is not resistive: {report.witness}")
    if report.is_max_resistive:
        return rel

    flipped = rel.scale(-1.0)
    graph = cayley(flipped, tol)
    completed = hermitian_completion(graph, tol)
    monotone = inverse_cayley(completed, tol)
    extension = monotone.scale(-1.0)
    logger.debug("resistive extension: dim %d -> %d", rel.dim, extension.dim)
    return _finalize(extension, rel, GraphFlavor.MAX_RESISTIVE, tol)

"""Extended graph representations of maximal structures.

Every Dirac, Lagrange, maximal resistive or maximal monotone relation
``M ⊂ Kⁿ × Kⁿ`` can be written as

    M = {(M e - G λ, e) : G* e = 0, λ ∈ Kˡ}

with ``G`` injective (``ran G = ker M``) and ``M`` a matrix that is skew,
Hermitian, Hermitian negative semidefinite or accretive respectively.

Construction: ``G`` is an orthonormal basis of the relation kernel.  For an
image basis ``[X₁; X₂]`` every ``e ∈ ker G* = ran X₂`` has flow fiber
``X₁ X₂† e + ran G``; projecting with ``Π = I - GG*`` removes exactly that
ambiguity, so ``M = Π X₁ X₂†`` (zero on ``ran G``).  The result satisfies
``M ker G* ⊆ ker G*`` and ``ran M ⟂ ran G``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from phbridge.core.errors import ExtensionFailed, FlavorMismatch, NotMaximal, NotMember
from phbridge.core.kinds import GraphFlavor
from phbridge.core.tolerance import TolerancePolicy
from phbridge.relations.kernel import (
    as_vector,
    eig_extremes,
    hermitian_part,
    herm,
    null,
    pseudo_inverse,
    skew_part,
    spectral_norm,
)
from phbridge.relations.relation import LinearRelation
from phbridge.relations.structure import classify, is_structured

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExtendedGraphRep:
    """``(M, G)`` for ``{(M e - G λ, e) : G* e = 0}``.

    With ``inverted=True`` the same pair describes the inverse form
    ``{(e, M e - G λ) : G* e = 0}``.
    """

    flavor: GraphFlavor
    M: np.ndarray
    G: np.ndarray
    inverted: bool = False

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def l(self) -> int:  # noqa: E743
        return self.G.shape[1]

    def constraint_basis(self) -> np.ndarray:
        """Orthonormal basis of ``ker G*``."""
        if self.l == 0:
            return np.eye(self.n, dtype=self.M.dtype)
        return null(herm(self.G))

    def relation(self, tol: TolerancePolicy | None = None) -> LinearRelation:
        """Rebuild the represented relation."""
        z = self.constraint_basis()
        dtype = np.result_type(self.M, self.G, z)
        flows = np.hstack([self.M @ z, -self.G]).astype(dtype)
        efforts = np.hstack([z, np.zeros((self.n, self.l))]).astype(dtype)
        blocks = [efforts, flows] if self.inverted else [flows, efforts]
        return LinearRelation.from_image(np.vstack(blocks), self.n, self.n, tol)


def _verify(rep: ExtendedGraphRep, source: LinearRelation, tol: float) -> None:
    m, g = rep.M, rep.G
    lo, hi = eig_extremes(m)
    checks = {
        GraphFlavor.DIRAC: spectral_norm(m + herm(m)),
        GraphFlavor.LAGRANGE: spectral_norm(m - herm(m)),
        GraphFlavor.MAX_RESISTIVE: max(spectral_norm(m - herm(m)), hi),
        GraphFlavor.MAX_MONOTONE: max(-lo, 0.0),
    }
    residuals = {
        "structure": checks[rep.flavor],
        "orthonormal_G": spectral_norm(herm(g) @ g - np.eye(rep.l)),
        "invariance": spectral_norm(herm(g) @ m),
        "reconstruction": source.gap(rep.relation(source.tol)),
    }
    failed = {k: v for k, v in residuals.items() if v > tol}
    if failed:
        raise ExtensionFailed(
            f"{rep.flavor} representation failed verification: "
            + ", ".join(f"{k}={v:.3e}" for k, v in failed.items())
        )


def _check_flavor(rel: LinearRelation, flavor: GraphFlavor, tol: float) -> None:
    if is_structured(rel, flavor, tol):
        return
    if rel.dim != rel.n_left:
        raise NotMaximal(f"relation has dimension {rel.dim}, maximal needs {rel.n_left}")
    raise FlavorMismatch(f"relation is not {flavor}: {classify(rel, tol).witness}")


def _structured(m: np.ndarray, flavor: GraphFlavor) -> np.ndarray:
    if flavor is GraphFlavor.DIRAC:
        return skew_part(m)
    if flavor in (GraphFlavor.LAGRANGE, GraphFlavor.MAX_RESISTIVE):
        return hermitian_part(m)
    return m


def extended_graph_rep(
    rel: LinearRelation, flavor: GraphFlavor | str, tol: float | None = None
) -> ExtendedGraphRep:
    """``(M, G)`` for a maximal structure of the declared flavor.

    Raises:
        NotMaximal: ``dim ≠ n``.
        FlavorMismatch: the relation is maximal but not of ``flavor``.
        ExtensionFailed: the constructed pair fails verification.
    """
    flavor = GraphFlavor(flavor)
    tol = rel.tol.check if tol is None else tol
    _check_flavor(rel, flavor, tol)

    g = rel.parts().ker
    x1, x2 = rel.first, rel.second
    proj = np.eye(rel.n_left) - g @ herm(g)
    m = _structured(proj @ x1 @ pseudo_inverse(x2, rel.tol), flavor)

    rep = ExtendedGraphRep(flavor=flavor, M=m, G=g)
    _verify(rep, rel, tol)
    logger.debug("extended_graph_rep(%s): n=%d, l=%d", flavor, rep.n, rep.l)
    return rep


def extended_graph_rep_inverse(
    rel: LinearRelation, flavor: GraphFlavor | str, tol: float | None = None
) -> ExtendedGraphRep:
    """``(M̂, Ĝ)`` for the form ``{(e, M̂ e - Ĝ λ) : Ĝ* e = 0}``."""
    rep = extended_graph_rep(rel.inverse(), flavor, tol)
    return ExtendedGraphRep(flavor=rep.flavor, M=rep.M, G=rep.G, inverted=True)


def recover_components(
    rep: ExtendedGraphRep, pair, tol: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """The unique ``(e, λ)`` behind a member ``pair``.

    ``e`` is the effort component and ``λ = G†(M e - f)``; ``G`` has
    orthonormal columns, so ``G† = G*``.

    Raises:
        NotMember: ``pair`` is not in the represented relation.
    """
    v = as_vector(pair, 2 * rep.n, name="pair")
    relation = rep.relation()
    limit = relation.tol.check if tol is None else tol
    residual = relation.contains(v)
    if residual > limit:
        raise NotMember(f"pair has membership residual {residual:.3e} > {limit:.3e}")
    e, lam = components(rep, v[None, :])
    return e[0], lam[0]


def components(rep: ExtendedGraphRep, pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise ``(e, λ)`` for a ``(samples, 2n)`` array, without membership checks."""
    n = rep.n
    if rep.inverted:
        e, f = pairs[:, :n], pairs[:, n:]
    else:
        f, e = pairs[:, :n], pairs[:, n:]
    lam = (e @ rep.M.T - f) @ rep.G.conj()
    return e, lam

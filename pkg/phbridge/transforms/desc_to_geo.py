"""Descriptor → geometric.

For a pH descriptor system with ``ker E ∩ ker Q = {0}`` the triple

    L = ran[E; Q],   R = graph(-W₀) ⊂ K^r × K^r (r = n + m),
    D = inverse_graph(U D̃ U*),   D̃ = [[-Γ, -I_r], [I_r, 0]],
    Γ = [[J, B], [-B*, -N]]

is a geometric pH system with the same solutions, where ``W₀ = [[R, P],
[P*, S]]`` and ``U`` reorders ``(n, m, r)`` port blocks into ``(n, r, m)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from phbridge.core.errors import IndefiniteDissipation, KernelOverlap, NoConsistentZ, ResidualTooLarge
from phbridge.core.kinds import Channel
from phbridge.core.tolerance import TolerancePolicy, trajectory_tol
from phbridge.relations.kernel import eig_extremes, herm, pseudo_inverse, rank_factor
from phbridge.relations.relation import LinearRelation, graph, inverse_graph
from phbridge.systems.balance import descriptor_defects
from phbridge.systems.descriptor import DescriptorPH, dissipation_block, require_descriptor
from phbridge.systems.geometric import GeometricPH
from phbridge.systems.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GeoMaps:
    n: int
    m: int
    gamma: np.ndarray
    U: np.ndarray
    D_tilde: np.ndarray
    W0: np.ndarray

    @property
    def r(self) -> int:
        return self.n + self.m

    def dims(self) -> dict[str, int]:
        return {"n": self.n, "r": self.r, "m": self.m}


def port_permutation(n: int, m: int) -> np.ndarray:
    """``U`` with ``U (a, b, c) = (a, c, b)`` for blocks of sizes ``n``, ``m``, ``n + m``."""
    r = n + m
    order = np.concatenate([np.arange(n), n + m + np.arange(r), n + np.arange(m)])
    return np.eye(n + m + r)[order]


def kernel_overlap(dsys: DescriptorPH) -> int:
    """``dim(ker E ∩ ker Q)``."""
    return dsys.n - rank_factor(np.vstack([dsys.E, dsys.Q]), dsys.tol).rank


def descriptor_to_geometric(
    dsys: DescriptorPH, tol: TolerancePolicy | None = None
) -> tuple[GeometricPH, GeoMaps]:
    """Geometric system with the same solutions as ``dsys``.

    Raises:
        NotDescriptor: ``dsys`` fails :func:`validate_descriptor`.
        KernelOverlap: ``ker E ∩ ker Q ≠ {0}``.
        IndefiniteDissipation: ``W₀`` is not positive semidefinite.
    """
    tol = tol or dsys.tol
    overlap = kernel_overlap(dsys)
    if overlap:
        raise KernelOverlap(f"ker E ∩ ker Q has dimension {overlap}")
    require_descriptor(dsys, tol.check)

    n, m = dsys.n, dsys.m
    w0 = dissipation_block(dsys)
    w_min, _ = eig_extremes(w0)
    if w_min < -tol.check:
        raise IndefiniteDissipation(
            f"[[R, P], [P*, S]] has eigenvalue {w_min:.3e}; graph(-W0) is not resistive"
        )
    w0 = (w0 + herm(w0)) / 2

    gamma = np.block([[dsys.J, dsys.B], [-herm(dsys.B), -dsys.N]])
    r = n + m
    d_tilde = np.block(
        [[-gamma, -np.eye(r)], [np.eye(r), np.zeros((r, r))]]
    )
    u = port_permutation(n, m)

    gph = GeometricPH(
        n=n,
        r=r,
        m=m,
        D=inverse_graph(u @ d_tilde @ u.T, tol),
        L=LinearRelation.from_image(np.vstack([dsys.E, dsys.Q]), n, n, tol),
        R=graph(-w0, tol),
    )
    logger.debug("descriptor_to_geometric: n=%d, r=%d, m=%d", n, r, m)
    return gph, GeoMaps(n=n, m=m, gamma=gamma, U=u, D_tilde=d_tilde, W0=w0)


def desc_solution_to_geo(
    dsys: DescriptorPH,
    maps: GeoMaps,
    traj: Trajectory,
    tol: TolerancePolicy | None = None,
) -> Trajectory:
    """``x = Ez``, ``e_L = Qz``, ``f_R = (Qz, u)``, ``e_R = -W₀ f_R``.

    ``x_dot`` is the exact right-hand side ``(J-R)Qz + (B-P)u``.

    Raises:
        ResidualTooLarge: ``traj`` does not solve the DAE to ``tol(h)``.
    """
    tol = tol or dsys.tol
    limit = trajectory_tol(traj.h, tol)
    for name, defect in descriptor_defects(dsys, traj).items():
        if defect.size and float(np.max(defect)) > limit:
            worst = int(np.argmax(defect))
            raise ResidualTooLarge(
                f"{name} defect {defect[worst]:.3e} at sample {worst} exceeds {limit:.3e}"
            )

    z, u, y = traj.require(Channel.Z, Channel.U, Channel.Y)
    e_l = z @ dsys.Q.T
    f_r = np.hstack([e_l, u])
    return Trajectory(
        grid=traj.grid,
        channels={
            Channel.X: z @ dsys.E.T,
            Channel.X_DOT: z @ dsys.A.T + u @ dsys.input_matrix.T,
            Channel.E_L: e_l,
            Channel.F_R: f_r,
            Channel.E_R: -f_r @ maps.W0.T,
            Channel.U: u,
            Channel.Y: y,
        },
        metadata=dict(traj.metadata),
    )


def geo_solution_to_desc(
    dsys: DescriptorPH,
    maps: GeoMaps,
    traj: Trajectory,
    tol: TolerancePolicy | None = None,
) -> Trajectory:
    """``z`` solving ``[E; Q] z = [x; e_L]`` at every sample.

    Raises:
        NoConsistentZ: the stacked system is inconsistent at some sample.
    """
    tol = tol or dsys.tol
    x, e_l, u, y = traj.require(Channel.X, Channel.E_L, Channel.U, Channel.Y)
    stacked = np.vstack([dsys.E, dsys.Q])
    rhs = np.hstack([x, e_l])
    z = rhs @ pseudo_inverse(stacked, tol).T
    residual = np.linalg.norm(z @ stacked.T - rhs, axis=1) / np.maximum(
        1.0, np.linalg.norm(rhs, axis=1)
    )
    worst = int(np.argmax(residual))
    if residual[worst] > tol.check:
        raise NoConsistentZ(
            f"[E; Q] z = [x; e_L] has residual {residual[worst]:.3e} at sample {worst}"
        )
    return Trajectory(
        grid=traj.grid,
        channels={Channel.Z: z, Channel.U: u, Channel.Y: y},
        metadata=dict(traj.metadata),
    )

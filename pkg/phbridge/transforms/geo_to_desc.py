"""Geometric → descriptor.

Each of ``D``, ``R``, ``L`` is written in extended graph form

    D: (-ẋ, f_R, y) = J̃ (e_L, e_R, u) - G λ,        G* (e_L, e_R, u) = 0
    R: f_R = -R̃ e_R + G_R λ_R,                        G_R* e_R = 0
    L: x = L e_L - G_L λ_L,                            G_L* e_L = 0

and eliminating the flows gives a descriptor system in
``z = (e_L, e_R, λ, λ_R, μ_L)`` with ``μ_L = λ̇_L``, ``Q = I``, ``P = 0``
and ``S = 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from phbridge.core.errors import InconsistentInitial, NotMember, ShapeError
from phbridge.core.kinds import Channel, GraphFlavor
from phbridge.core.tolerance import TolerancePolicy, trajectory_tol
from phbridge.extension.graph_rep import ExtendedGraphRep, components, extended_graph_rep
from phbridge.relations.kernel import as_vector, herm, result_dtype
from phbridge.systems.descriptor import DescriptorPH
from phbridge.systems.geometric import (
    GeometricPH,
    membership_residuals,
    require_geometric,
    state_derivative,
)
from phbridge.systems.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LiftData:
    """The three extended graph representations behind a conversion."""

    n: int
    r: int
    m: int
    dirac: ExtendedGraphRep
    resistive: ExtendedGraphRep
    lagrange: ExtendedGraphRep

    # ── representation matrices ──────────────────────────────────────

    @property
    def J_tilde(self) -> np.ndarray:
        return self.dirac.M

    @property
    def G(self) -> np.ndarray:
        return self.dirac.G

    @property
    def R_tilde(self) -> np.ndarray:
        return -self.resistive.M

    @property
    def G_R(self) -> np.ndarray:
        return self.resistive.G

    @property
    def L_mat(self) -> np.ndarray:
        return self.lagrange.M

    @property
    def G_L(self) -> np.ndarray:
        return self.lagrange.G

    # ── dimensions ────────────────────────────────────────────────────

    @property
    def d(self) -> int:
        return self.dirac.l

    @property
    def k(self) -> int:
        return self.resistive.l

    @property
    def l(self) -> int:  # noqa: E743
        return self.lagrange.l

    @property
    def p(self) -> int:
        return self.d + self.k + self.l

    @property
    def state_dim(self) -> int:
        return self.n + self.r + self.p

    def port_slices(self) -> tuple[slice, slice, slice]:
        """Positions of the ``n``, ``r`` and ``m`` blocks inside ``J̃`` and ``G``."""
        n, r, m = self.n, self.r, self.m
        return slice(0, n), slice(n, n + r), slice(n + r, n + r + m)

    def state_slices(self) -> dict[str, slice]:
        """Positions of ``e_L``, ``e_R``, ``λ``, ``λ_R``, ``μ_L`` inside ``z``."""
        bounds = np.cumsum([0, self.n, self.r, self.d, self.k, self.l])
        names = (Channel.E_L, Channel.E_R, Channel.LAM, Channel.LAM_R, Channel.MU_L)
        return {
            str(name): slice(int(lo), int(hi))
            for name, lo, hi in zip(names, bounds[:-1], bounds[1:])
        }

    def dims(self) -> dict[str, int]:
        return {
            "n": self.n, "r": self.r, "m": self.m,
            "d": self.d, "k": self.k, "l": self.l, "p": self.p,
            "state_dim": self.state_dim,
        }


def geometric_to_descriptor(
    gph: GeometricPH, tol: TolerancePolicy | None = None
) -> tuple[DescriptorPH, LiftData]:
    """Descriptor system with the same solutions as ``gph``.

    Raises:
        NotGeometric: ``gph`` fails :func:`validate_geometric`.
        ExtensionFailed: a representation failed verification.
    """
    tol = tol or gph.D.tol
    require_geometric(gph, tol.check)
    lift = LiftData(
        n=gph.n,
        r=gph.r,
        m=gph.m,
        dirac=extended_graph_rep(gph.D, GraphFlavor.DIRAC, tol.check),
        resistive=extended_graph_rep(gph.R, GraphFlavor.MAX_RESISTIVE, tol.check),
        lagrange=extended_graph_rep(gph.L, GraphFlavor.LAGRANGE, tol.check),
    )
    logger.debug("geometric_to_descriptor: %s", lift.dims())

    p1, p2, p3 = lift.port_slices()
    jt, g = lift.J_tilde, lift.G
    z = lift.state_slices()
    e_l, e_r = z[Channel.E_L], z[Channel.E_R]
    lam, lam_r, mu = z[Channel.LAM], z[Channel.LAM_R], z[Channel.MU_L]

    size = lift.state_dim
    dtype = result_dtype(jt, g, lift.R_tilde, lift.G_R, lift.L_mat, lift.G_L)
    E = np.zeros((size, size), dtype=dtype)
    J = np.zeros((size, size), dtype=dtype)
    R = np.zeros((size, size), dtype=dtype)
    B = np.zeros((size, gph.m), dtype=dtype)

    E[e_l, e_l] = lift.L_mat

    J[e_l, e_l] = -jt[p1, p1]
    J[e_l, e_r] = -jt[p1, p2]
    J[e_l, lam] = g[p1]
    J[e_l, mu] = lift.G_L
    J[e_r, e_l] = herm(jt[p1, p2])
    J[e_r, e_r] = -jt[p2, p2]
    J[e_r, lam] = g[p2]
    J[e_r, lam_r] = lift.G_R
    J[lam, e_l] = -herm(g[p1])
    J[lam, e_r] = -herm(g[p2])
    J[lam_r, e_r] = -herm(lift.G_R)
    J[mu, e_l] = -herm(lift.G_L)

    R[e_r, e_r] = lift.R_tilde

    B[e_l] = -jt[p1, p3]
    B[e_r] = -jt[p2, p3]
    B[lam] = -herm(g[p3])

    dsys = DescriptorPH.build(
        E=E, J=J, R=R, Q=np.eye(size), B=B, N=jt[p3, p3], tol=tol
    )
    return dsys, lift


def _require_members(
    gph: GeometricPH, traj: Trajectory, limit: float, error: type[Exception] = NotMember
) -> None:
    for name, residuals in membership_residuals(gph, traj).items():
        worst = int(np.argmax(residuals))
        if residuals[worst] > limit:
            raise error(
                f"sample {worst} (t={traj.grid[worst]:.6g}) is not in {name}: "
                f"residual {residuals[worst]:.3e} > {limit:.3e}"
            )


def lift_solution(
    gph: GeometricPH,
    lift: LiftData,
    traj: Trajectory,
    tol: TolerancePolicy | None = None,
) -> Trajectory:
    """Descriptor trajectory ``z = (e_L, e_R, λ, λ_R, μ_L)`` behind a geometric one.

    ``μ_L`` is ``λ̇_L`` by central differences.

    Raises:
        NotMember: a sample violates one of the geometric memberships.
        MissingChannel: a required channel is absent.
    """
    tol = tol or gph.D.tol
    limit = trajectory_tol(traj.h, tol)
    _require_members(gph, traj, limit)

    x, f_r, e_r, e_l, u, y = traj.require(
        Channel.X, Channel.F_R, Channel.E_R, Channel.E_L, Channel.U, Channel.Y
    )
    x_dot = state_derivative(traj)
    _, lam = components(lift.dirac, gph.dirac_pairs(x_dot, f_r, y, e_l, e_r, u))
    _, lam_rep = components(lift.resistive, np.hstack([f_r, e_r]))
    _, lam_l = components(lift.lagrange, np.hstack([x, e_l]))
    if lift.l:
        edge = 2 if traj.samples >= 3 else 1
        mu_l = np.gradient(lam_l, traj.grid, axis=0, edge_order=edge)
    else:
        mu_l = np.zeros((traj.samples, 0))

    z = np.hstack([e_l, e_r, lam, -lam_rep, mu_l])
    return Trajectory(
        grid=traj.grid,
        channels={Channel.Z: z, Channel.U: u, Channel.Y: y, Channel.LAM_L: lam_l},
        metadata={**traj.metadata, "lifted": True},
    )


def project_solution(
    gph: GeometricPH,
    lift: LiftData,
    traj: Trajectory,
    x0,
    tol: TolerancePolicy | None = None,
) -> Trajectory:
    """Geometric trajectory behind a descriptor solution ``z``.

    ``λ_L(t) = λ_L⁰ + ∫₀ᵗ μ_L`` (trapezoid rule) with
    ``λ_L⁰ = G_L*(L e_L(0) - x₀)``, then ``x = L e_L - G_L λ_L`` and
    ``f_R = -R̃ e_R + G_R λ_R``.  The returned ``x_dot`` channel is ``ẋ``
    read off the flow part of ``D``.

    Raises:
        InconsistentInitial: ``(x₀, e_L(0))`` is not in ``L``.
        NotMember: a mapped sample violates a geometric membership.
    """
    tol = tol or gph.D.tol
    z, u, y = traj.require(Channel.Z, Channel.U, Channel.Y)
    if z.shape[1] != lift.state_dim:
        raise ShapeError(f"z has width {z.shape[1]}, expected {lift.state_dim}")
    parts = {name: z[:, s] for name, s in lift.state_slices().items()}
    e_l, e_r = parts[Channel.E_L], parts[Channel.E_R]
    lam, lam_r, mu_l = parts[Channel.LAM], parts[Channel.LAM_R], parts[Channel.MU_L]

    x0 = as_vector(x0, gph.n, name="x0")
    initial = np.concatenate([x0, e_l[0]])
    residual = gph.L.contains(initial)
    if residual > tol.check:
        raise InconsistentInitial(
            f"(x0, e_L(0)) is not in L: residual {residual:.3e} > {tol.check:.3e}"
        )

    if lift.l:
        _, lam_l0 = components(lift.lagrange, initial[np.newaxis, :])
        lam_l = lam_l0 + cumulative_trapezoid(mu_l, traj.grid, axis=0, initial=0)
    else:
        lam_l = np.zeros((traj.samples, 0))

    x = e_l @ lift.L_mat.T - lam_l @ lift.G_L.T
    f_r = -e_r @ lift.R_tilde.T + lam_r @ lift.G_R.T
    flows = np.hstack([e_l, e_r, u]) @ lift.J_tilde.T - lam @ lift.G.T
    x_dot = -flows[:, : gph.n]

    out = Trajectory(
        grid=traj.grid,
        channels={
            Channel.X: x,
            Channel.X_DOT: x_dot,
            Channel.F_R: f_r,
            Channel.E_R: e_r,
            Channel.E_L: e_l,
            Channel.U: u,
            Channel.Y: y,
            Channel.LAM_L: lam_l,
        },
        metadata={**traj.metadata, "projected": True},
    )
    _require_members(gph, out, trajectory_tol(traj.h, tol))
    return out

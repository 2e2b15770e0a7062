"""Power-balance residuals and pointwise defects of sampled trajectories."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel

from phbridge.core.kinds import Channel
from phbridge.relations.kernel import herm, left_null, orth, psd_sqrt
from phbridge.systems.descriptor import DescriptorPH, compute_W, hamiltonians
from phbridge.systems.geometric import GeometricPH, state_derivative
from phbridge.systems.trajectory import Trajectory

logger = logging.getLogger(__name__)


class BalanceSummary(BaseModel):
    """Per-sample power-balance residuals and their extremes.

    ``max_dissipation`` is ``max Re⟨f_R, e_R⟩`` (geometric) and must be
    non-positive up to tolerance; ``max_supply_excess`` is the largest excess
    of the stored-energy rate over the supplied power.
    """

    residuals: list[float]
    max_residual: float
    max_dissipation: float | None = None
    max_supply_excess: float


def _rowdot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise ``Re⟨a_k, b_k⟩``."""
    return np.real(np.sum(np.conj(a) * b, axis=1))


def geometric_power_residual(sys: GeometricPH, traj: Trajectory) -> BalanceSummary:
    """``|-Re⟨ẋ, e_L⟩ + Re⟨f_R, e_R⟩ + Re⟨y, u⟩|`` at each sample.

    Raises:
        MissingChannel: a required channel is absent.
    """
    f_r, e_r, e_l, u, y = traj.require(
        Channel.F_R, Channel.E_R, Channel.E_L, Channel.U, Channel.Y
    )
    x_dot = state_derivative(traj)
    stored = _rowdot(x_dot, e_l)
    dissipated = _rowdot(f_r, e_r)
    supplied = _rowdot(y, u)
    residuals = np.abs(-stored + dissipated + supplied)
    return BalanceSummary(
        residuals=residuals.tolist(),
        max_residual=float(np.max(residuals)),
        max_dissipation=float(np.max(dissipated)),
        max_supply_excess=float(np.max(stored - supplied)),
    )


def descriptor_power_residual(sys: DescriptorPH, traj: Trajectory) -> BalanceSummary:
    """``|ΔH/h - Re(u*y) + ‖W^½ (z, u)‖²|`` per step, the last two averaged over the step.

    ``W`` from :func:`compute_W` already carries ``Q``, so it acts on ``(z, u)``.

    Raises:
        MissingChannel: a required channel is absent.
    """
    z, u, y = traj.require(Channel.Z, Channel.U, Channel.Y)
    h = np.diff(traj.grid)
    energy = hamiltonians(sys, z)
    root = psd_sqrt(compute_W(sys))
    dissipation = np.sum(np.abs(np.hstack([z, u]) @ root.T) ** 2, axis=1)
    supplied = _rowdot(u, y)

    def midpoint(v: np.ndarray) -> np.ndarray:
        return (v[1:] + v[:-1]) / 2

    rate = np.diff(energy) / h
    residuals = np.abs(rate - midpoint(supplied) + midpoint(dissipation))
    return BalanceSummary(
        residuals=residuals.tolist(),
        max_residual=float(np.max(residuals)),
        max_supply_excess=float(np.max(rate - midpoint(supplied))),
    )


def descriptor_defects(sys: DescriptorPH, traj: Trajectory) -> dict[str, np.ndarray]:
    """Per-sample defects of the DAE and its output equation.

    ``algebraic``: ``‖N_E* ((J-R)Qz + (B-P)u)‖`` with ``N_E`` spanning the
    left null space of ``E``; ``output``: ``‖y - (B+P)*Qz - (S+N)u‖``;
    ``derivative``: ``‖Π_{ran E} (d/dt Ez - (J-R)Qz - (B-P)u)‖`` with the
    derivative taken by central differences.
    """
    z, u, y = traj.require(Channel.Z, Channel.U, Channel.Y)
    rhs = z @ sys.A.T + u @ sys.input_matrix.T
    ez = z @ sys.E.T
    edge = 2 if traj.samples >= 3 else 1
    ez_dot = np.gradient(ez, traj.grid, axis=0, edge_order=edge)

    null_e = left_null(sys.E, sys.tol)
    range_e = orth(sys.E, sys.tol)
    output = y - z @ sys.output_matrix.T - u @ sys.feedthrough.T
    return {
        "algebraic": np.linalg.norm(rhs @ null_e.conj(), axis=1),
        "output": np.linalg.norm(output, axis=1),
        "derivative": np.linalg.norm((ez_dot - rhs) @ range_e.conj(), axis=1),
    }


def constraint_matrix(sys: DescriptorPH) -> tuple[np.ndarray, np.ndarray]:
    """``(N_E* (J-R)Q, N_E* (B-P))``: the explicit algebraic rows."""
    null_e = left_null(sys.E, sys.tol)
    return herm(null_e) @ sys.A, herm(null_e) @ sys.input_matrix

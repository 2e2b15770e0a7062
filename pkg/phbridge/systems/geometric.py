"""Geometric port-Hamiltonian systems ``(D, L, R)``.

Flow and effort blocks of the Dirac structure are ordered
``(-ẋ, f_R, y | e_L, e_R, u)``; the Lagrange structure pairs ``(x, e_L)``
and the resistive structure ``(f_R, e_R)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel

from phbridge.core.errors import NotGeometric, ShapeError
from phbridge.core.kinds import Channel
from phbridge.relations.relation import LinearRelation
from phbridge.relations.structure import StructureReport, classify
from phbridge.systems.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GeometricPH:
    n: int
    r: int
    m: int
    D: LinearRelation
    L: LinearRelation
    R: LinearRelation

    def __post_init__(self) -> None:
        checks = {
            "D": (self.D, self.size),
            "L": (self.L, self.n),
            "R": (self.R, self.r),
        }
        for name, (rel, size) in checks.items():
            if (rel.n_left, rel.n_right) != (size, size):
                raise ShapeError(
                    f"{name} lives in K^{rel.n_left}×K^{rel.n_right}, expected K^{size}×K^{size}"
                )

    @property
    def size(self) -> int:
        """``n + r + m``, the port dimension of ``D``."""
        return self.n + self.r + self.m

    @property
    def is_complex(self) -> bool:
        return self.D.is_complex or self.L.is_complex or self.R.is_complex

    def dirac_pairs(self, x_dot, f_r, y, e_l, e_r, u) -> np.ndarray:
        """Row-wise stacked ``(-ẋ, f_R, y, e_L, e_R, u)``."""
        return np.hstack([-np.asarray(x_dot), f_r, y, e_l, e_r, u])

    def __repr__(self) -> str:
        return f"GeometricPH(n={self.n}, r={self.r}, m={self.m})"


class GeometricReport(BaseModel):
    n: int
    r: int
    m: int
    dirac: StructureReport
    lagrange: StructureReport
    resistive: StructureReport
    passed: bool


def validate_geometric(sys: GeometricPH, tol: float | None = None) -> GeometricReport:
    d = classify(sys.D, tol)
    lag = classify(sys.L, tol)
    res = classify(sys.R, tol)
    # The maximal verdicts already carry the dimension count.
    passed = d.is_dirac and lag.is_lagrange and res.is_max_resistive
    return GeometricReport(
        n=sys.n, r=sys.r, m=sys.m, dirac=d, lagrange=lag, resistive=res, passed=passed
    )


def require_geometric(sys: GeometricPH, tol: float | None = None) -> GeometricReport:
    report = validate_geometric(sys, tol)
    if not report.passed:
        failing = [
            name
            for name, ok in (
                ("D is not Dirac", report.dirac.is_dirac),
                ("L is not Lagrange", report.lagrange.is_lagrange),
                ("R is not maximal resistive", report.resistive.is_max_resistive),
            )
            if not ok
        ]
        raise NotGeometric("; ".join(failing))
    return report


def state_derivative(traj: Trajectory) -> np.ndarray:
    """``ẋ``: the exact ``x_dot`` channel if present, else central differences of ``x``."""
    if traj.has(Channel.X_DOT):
        return traj.channel(Channel.X_DOT)
    return traj.derivative(Channel.X)


def membership_residuals(sys: GeometricPH, traj: Trajectory) -> dict[str, np.ndarray]:
    """Per-sample distances of the ``D``, ``L`` and ``R`` pairs from their relations.

    Raises:
        MissingChannel: a required channel is absent.
    """
    x, f_r, e_r, e_l, u, y = traj.require(
        Channel.X, Channel.F_R, Channel.E_R, Channel.E_L, Channel.U, Channel.Y
    )
    x_dot = state_derivative(traj)
    return {
        "D": sys.D.residuals(sys.dirac_pairs(x_dot, f_r, y, e_l, e_r, u)),
        "L": sys.L.residuals(np.hstack([x, e_l])),
        "R": sys.R.residuals(np.hstack([f_r, e_r])),
    }

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel

from phbridge.core.errors import ShapeError
from phbridge.core.kinds import Channel, SystemKind
from phbridge.core.tolerance import TolerancePolicy, trajectory_tol
from phbridge.systems.balance import (
    BalanceSummary,
    descriptor_defects,
    descriptor_power_residual,
    geometric_power_residual,
)
from phbridge.systems.descriptor import DescriptorPH
from phbridge.systems.geometric import GeometricPH, membership_residuals
from phbridge.systems.trajectory import Trajectory

logger = logging.getLogger(__name__)


class ResidualCheck(BaseModel):
    """One per-sample residual series against its limit."""

    name: str
    values: list[float]
    max: float
    worst_sample: int
    limit: float
    passed: bool


class VerificationReport(BaseModel):
    formulation: SystemKind
    samples: int
    h: float
    tolerance: float
    checks: list[ResidualCheck]
    balance: BalanceSummary
    passed: bool

    def failing(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]


def _check(name: str, values: np.ndarray, limit: float) -> ResidualCheck:
    values = np.asarray(values, dtype=float).reshape(-1)
    worst = int(np.argmax(values)) if values.size else 0
    peak = float(values[worst]) if values.size else 0.0
    return ResidualCheck(
        name=name,
        values=values.tolist(),
        max=peak,
        worst_sample=worst,
        limit=limit,
        passed=peak <= limit,
    )


def _expected_widths(sys: GeometricPH | DescriptorPH) -> dict[str, int]:
    if isinstance(sys, GeometricPH):
        return {
            Channel.X: sys.n,
            Channel.X_DOT: sys.n,
            Channel.E_L: sys.n,
            Channel.F_R: sys.r,
            Channel.E_R: sys.r,
            Channel.U: sys.m,
            Channel.Y: sys.m,
        }
    return {Channel.Z: sys.n, Channel.U: sys.m, Channel.Y: sys.m}


def _check_widths(sys: GeometricPH | DescriptorPH, traj: Trajectory) -> None:
    for name, width in _expected_widths(sys).items():
        if traj.has(name) and traj.channel(name).shape[1] != width:
            raise ShapeError(
                f"channel {name!r} has width {traj.channel(name).shape[1]}, expected {width}"
            )


def _verify_geometric(sys: GeometricPH, traj: Trajectory, limit: float):
    checks = [
        _check(f"membership_{name}", values, limit)
        for name, values in membership_residuals(sys, traj).items()
    ]
    if traj.has(Channel.X_DOT):
        defect = np.linalg.norm(traj.channel(Channel.X_DOT) - traj.derivative(Channel.X), axis=1)
        checks.append(_check("derivative", defect, limit))
    balance = geometric_power_residual(sys, traj)
    checks.append(_check("power_balance", np.array(balance.residuals), limit))
    # Resistive sign: Re⟨f_R, e_R⟩ ≤ 0 at every sample.
    checks.append(_check("dissipation", np.array([balance.max_dissipation]), limit))
    checks.append(_check("supply", np.array([balance.max_supply_excess]), limit))
    return checks, balance


def _verify_descriptor(sys: DescriptorPH, traj: Trajectory, limit: float):
    checks = [
        _check(name, values, limit) for name, values in descriptor_defects(sys, traj).items()
    ]
    balance = descriptor_power_residual(sys, traj)
    checks.append(_check("power_balance", np.array(balance.residuals), limit))
    return checks, balance


def verify_solution(
    sys: GeometricPH | DescriptorPH,
    traj: Trajectory,
    tol: TolerancePolicy | None = None,
) -> VerificationReport:
    """Membership, defect and power-balance residuals of ``traj`` against ``sys``.

    Every residual is compared with ``tol(h) = max(check, C·h)``.

    Raises:
        MissingChannel: a channel required by the formulation is absent.
        ShapeError: a channel width does not match the system dimensions.
    """
    _check_widths(sys, traj)
    tol = tol or (sys.D.tol if isinstance(sys, GeometricPH) else sys.tol)
    limit = trajectory_tol(traj.h, tol)
    if isinstance(sys, GeometricPH):
        kind = SystemKind.GEOMETRIC
        checks, balance = _verify_geometric(sys, traj, limit)
    else:
        kind = SystemKind.DESCRIPTOR
        checks, balance = _verify_descriptor(sys, traj, limit)

    report = VerificationReport(
        formulation=kind,
        samples=traj.samples,
        h=traj.h,
        tolerance=limit,
        checks=checks,
        balance=balance,
        passed=all(check.passed for check in checks),
    )
    if not report.passed:
        logger.info("verification failed: %s", ", ".join(report.failing()))
    return report

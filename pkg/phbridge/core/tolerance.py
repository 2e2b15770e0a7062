from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from phbridge.core.config import settings


class TolerancePolicy(BaseModel):
    """Thresholds used for every rank decision and structural verdict.

    A singular value ``σ`` counts as zero iff
    ``σ ≤ max(abs_floor, rel_eps · σ_max · max(rows, cols))``.
    ``check`` is the absolute tolerance for residual-style tests; all such
    residuals are measured on orthonormal bases, so an absolute value is
    meaningful.
    """

    model_config = ConfigDict(frozen=True)

    rel_eps: float = Field(default=1e-12, gt=0)
    abs_floor: float = Field(default=1e-14, ge=0)
    check: float = Field(default=1e-9, gt=0)

    @classmethod
    def from_settings(cls) -> TolerancePolicy:
        return cls(
            rel_eps=settings.tol_rel,
            abs_floor=settings.tol_abs,
            check=settings.check_tol,
        )

    def threshold(self, sigma_max: float, rows: int, cols: int) -> float:
        return max(self.abs_floor, self.rel_eps * sigma_max * max(rows, cols))


def default_policy() -> TolerancePolicy:
    """Policy built from the current settings (read at call time)."""
    return TolerancePolicy.from_settings()


def trajectory_tol(h: float, policy: TolerancePolicy | None = None) -> float:
    """Residual tolerance for sampled trajectories with step ``h``."""
    policy = policy or default_policy()
    return max(policy.check, settings.residual_coeff * h)

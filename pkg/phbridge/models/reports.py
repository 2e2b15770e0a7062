from __future__ import annotations

from pydantic import BaseModel

from phbridge.core.kinds import SystemKind
from phbridge.transforms.pencil import PositiveRealReport


class SimulationSummary(BaseModel):
    """Printed by ``simulate``; the trajectory itself goes to ``--out``."""

    samples: int
    h: float
    state_dim: int
    converted_from: str | None = None
    initial_H: float
    final_H: float
    max_power_residual: float


class TransferReport(BaseModel):
    source_kind: SystemKind
    state_dim: int
    positive_real: PositiveRealReport


class ErrorReport(BaseModel):
    error: str
    detail: str
    exit_code: int

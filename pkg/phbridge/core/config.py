from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="PHBRIDGE_", extra="ignore"
    )

    # Rank decisions
    tol_rel: float = 1e-12
    tol_abs: float = 1e-14

    # Structural verdicts (Gram residuals, membership, reconstruction gaps)
    check_tol: float = 1e-9

    # Trajectory residuals: tol(h) = max(check_tol, residual_coeff * h)
    residual_coeff: float = 10.0

    # Pencil regularity certification
    pencil_shifts: int = 8

    # Reproducibility
    seed: int = 0

    # Logging
    log_level: str = "INFO"


settings = Settings()

"""Input signals and simulation configuration."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from phbridge.core.config import settings
from phbridge.core.errors import FileFormatError, ShapeError

logger = logging.getLogger(__name__)


class InputSpec(BaseModel):
    """A parametric input ``u(t)``.

    - ``zero``: ``u ≡ 0``.
    - ``sinusoid``: ``u_i(t) = a_i sin(ω_i t)`` (angular frequency ``ω_i``).
    - ``polynomial``: ``u_i(t) = Σ_j c_ij t^j`` (ascending powers).
    - ``table``: piecewise-linear interpolation of ``values`` at ``times``.

    Per-channel lists of length one are broadcast to every channel.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["zero", "sinusoid", "polynomial", "table"] = "zero"
    amplitude: list[float] = Field(default_factory=lambda: [1.0])
    frequency: list[float] = Field(default_factory=lambda: [1.0])
    coefficients: list[list[float]] = Field(default_factory=list)
    times: list[float] = Field(default_factory=list)
    values: list[list[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_table(self) -> InputSpec:
        if self.kind == "table":
            if len(self.times) < 2 or len(self.times) != len(self.values):
                raise ValueError("table input needs ≥ 2 times and one value row per time")
            if np.any(np.diff(self.times) <= 0):
                raise ValueError("table times must be strictly increasing")
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("polynomial input needs coefficients")
        return self

    @classmethod
    def parse(cls, text: str) -> InputSpec:
        """``zero``, ``sin[:a[,ω]]``, ``poly:c0,c1,...`` or ``@spec.json``.

        Raises:
            FileFormatError: the text is not a recognized input description.
        """
        text = text.strip()
        head, _, tail = text.partition(":")
        try:
            if text.startswith("@"):
                return cls.model_validate_json(Path(text[1:]).read_text())
            if text == "zero":
                return cls()
            if head in ("sin", "sinusoid"):
                params = [float(v) for v in tail.split(",")] if tail else []
                amp = params[0] if params else 1.0
                freq = params[1] if len(params) > 1 else 1.0
                return cls(kind="sinusoid", amplitude=[amp], frequency=[freq])
            if head in ("poly", "polynomial") and tail:
                return cls(kind="polynomial", coefficients=[[float(v) for v in tail.split(",")]])
        except (OSError, ValueError, ValidationError) as exc:
            raise FileFormatError(f"invalid input description {text!r}: {exc}") from exc
        raise FileFormatError(f"unknown input description {text!r}")

    def _per_channel(self, items: list, m: int, name: str) -> list:
        if len(items) == 1:
            return items * m
        if len(items) != m:
            raise ShapeError(f"{name} has {len(items)} entries for {m} input channels")
        return items

    def evaluate(self, grid: np.ndarray, m: int) -> np.ndarray:
        """Samples ``u(t_k)`` as a ``(len(grid), m)`` array."""
        grid = np.asarray(grid, dtype=float)
        if m == 0 or self.kind == "zero":
            return np.zeros((grid.size, m))
        if self.kind == "sinusoid":
            amp = np.array(self._per_channel(self.amplitude, m, "amplitude"))
            freq = np.array(self._per_channel(self.frequency, m, "frequency"))
            return amp * np.sin(np.outer(grid, freq))
        if self.kind == "polynomial":
            coeffs = self._per_channel(self.coefficients, m, "coefficients")
            return np.column_stack([npoly.polyval(grid, c) for c in coeffs])
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != m:
            raise ShapeError(f"table values have shape {values.shape}, expected (·, {m})")
        return np.column_stack([np.interp(grid, self.times, values[:, i]) for i in range(m)])

    def derivatives(self, t: float, m: int, order: int) -> np.ndarray:
        """``u(t), u'(t), ..., u^(order)(t)`` as an ``(order + 1, m)`` array.

        Tables use the slope of the segment starting at ``t``; their higher
        derivatives are zero.
        """
        out = np.zeros((order + 1, m))
        if m == 0 or self.kind == "zero":
            return out
        if self.kind == "sinusoid":
            amp = np.array(self._per_channel(self.amplitude, m, "amplitude"))
            freq = np.array(self._per_channel(self.frequency, m, "frequency"))
            for j in range(order + 1):
                out[j] = amp * freq**j * np.sin(freq * t + j * np.pi / 2)
            return out
        if self.kind == "polynomial":
            coeffs = self._per_channel(self.coefficients, m, "coefficients")
            for i, c in enumerate(coeffs):
                for j in range(order + 1):
                    out[j, i] = npoly.polyval(t, npoly.polyder(c, j)) if j < len(c) else 0.0
            return out
        out[0] = self.evaluate(np.array([t]), m)[0]
        if order:
            times = np.asarray(self.times)
            values = np.asarray(self.values, dtype=float)
            seg = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2))
            out[1] = (values[seg + 1] - values[seg]) / (times[seg + 1] - times[seg])
        return out


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_end: float = Field(gt=0)
    h: float = Field(gt=0)
    input: InputSpec = Field(default_factory=InputSpec)
    seed: int = Field(default_factory=lambda: settings.seed)

    @model_validator(mode="after")
    def _check_span(self) -> SimConfig:
        if self.t_end < self.h:
            raise ValueError(f"t_end = {self.t_end} is shorter than one step h = {self.h}")
        if self.input.kind == "table":
            if self.input.times[0] > 0 or self.input.times[-1] < self.t_end:
                raise ValueError("table input does not cover [0, t_end]")
        return self

    def grid(self, h: float | None = None) -> np.ndarray:
        """Uniform grid from 0 with the number of steps rounded to fit ``t_end``."""
        h = self.h if h is None else h
        steps = max(1, int(round(self.t_end / h)))
        return h * np.arange(steps + 1)

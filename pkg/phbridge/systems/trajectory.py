from __future__ import annotations

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np

from phbridge.core.errors import InvalidMatrix, MissingChannel, ShapeError

logger = logging.getLogger(__name__)

# Relative tolerance on the spacing of a uniform grid.
_GRID_RTOL = 1e-8


def _channel_array(name: str, values, samples: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind in "biu":
        arr = arr.astype(float)
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2 or arr.shape[0] != samples:
        raise ShapeError(f"channel {name!r} has shape {arr.shape}, expected ({samples}, k)")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"channel {name!r} contains non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled signals on a uniform grid.

    Every channel is a ``(samples, width)`` array, one row per grid point.
    """

    grid: np.ndarray
    channels: Mapping[str, np.ndarray]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float).reshape(-1)
        if grid.size < 2:
            raise ShapeError(f"trajectory needs at least 2 samples, got {grid.size}")
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise ShapeError("grid is not strictly increasing")
        if np.max(np.abs(steps - steps[0])) > _GRID_RTOL * steps[0]:
            raise ShapeError("grid is not uniform")
        grid.flags.writeable = False
        channels = {
            str(name): _channel_array(str(name), values, grid.size)
            for name, values in self.channels.items()
        }
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "channels", MappingProxyType(channels))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @property
    def samples(self) -> int:
        return self.grid.size

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def names(self) -> list[str]:
        return sorted(self.channels)

    def has(self, name: str) -> bool:
        return str(name) in self.channels

    def channel(self, name: str) -> np.ndarray:
        try:
            return self.channels[str(name)]
        except KeyError:
            raise MissingChannel(
                f"trajectory has no {str(name)!r} channel (has {', '.join(self.names)})"
            ) from None

    def require(self, *names: str) -> list[np.ndarray]:
        return [self.channel(name) for name in names]

    def with_channels(self, **updates) -> Trajectory:
        channels = dict(self.channels)
        channels.update(updates)
        return Trajectory(grid=self.grid, channels=channels, metadata=self.metadata)

    def derivative(self, name: str) -> np.ndarray:
        """Central differences along the grid, second-order one-sided at the ends."""
        values = self.channel(name)
        edge = 2 if self.samples >= 3 else 1
        return np.gradient(values, self.grid, axis=0, edge_order=edge)

    def __repr__(self) -> str:
        return (
            f"Trajectory(samples={self.samples}, h={self.h:.3g}, "
            f"channels=[{', '.join(self.names)}])"
        )

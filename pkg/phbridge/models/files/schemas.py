"""JSON file schemas.

Every file is one document ``{header, <kind payload>, metadata}``.  Matrices
are ``{rows, cols, data}`` with row-major ``data``; complex files store each
entry as an ``[re, im]`` pair and real files must not use the pair form.
"""

from __future__ import annotations

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from phbridge.core.kinds import ScalarField, SystemKind

FORMAT_VERSION = 1


class Header(BaseModel):
    format_version: Literal[1] = FORMAT_VERSION
    field: ScalarField
    kind: SystemKind


class MatrixPayload(BaseModel):
    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    data: list[float] | list[tuple[float, float]]

    @model_validator(mode="after")
    def _check_size(self) -> MatrixPayload:
        if len(self.data) != self.rows * self.cols:
            raise ValueError(
                f"matrix declares {self.rows}x{self.cols} but has {len(self.data)} entries"
            )
        return self

    @property
    def is_pairs(self) -> bool:
        return bool(self.data) and isinstance(self.data[0], tuple)

    @classmethod
    def from_array(cls, a: np.ndarray, field: ScalarField) -> MatrixPayload:
        a = np.atleast_2d(np.asarray(a))
        flat = a.reshape(-1)
        if field is ScalarField.COMPLEX:
            data = [(float(v.real), float(v.imag)) for v in flat.astype(complex)]
        else:
            data = [float(v) for v in flat.real]
        return cls(rows=a.shape[0], cols=a.shape[1], data=data)

    def to_array(self) -> np.ndarray:
        if self.is_pairs:
            pairs = np.asarray(self.data, dtype=float)
            flat = pairs[:, 0] + 1j * pairs[:, 1]
        else:
            flat = np.asarray(self.data, dtype=float)
        return flat.reshape(self.rows, self.cols)


class RelationPayload(BaseModel):
    """A relation given by ``matrix``.

    Image files written by phbridge also carry the orthonormal ``kernel``
    basis, so reading them back reproduces both bases bit for bit.
    """

    n_left: int = Field(ge=0)
    n_right: int = Field(ge=0)
    representation: Literal["image", "kernel"] = "image"
    matrix: MatrixPayload
    kernel: MatrixPayload | None = None

    @model_validator(mode="after")
    def _check_kernel(self) -> RelationPayload:
        if self.kernel is not None and self.representation != "image":
            raise ValueError("a kernel basis only accompanies the image representation")
        return self

    def matrices(self) -> list[MatrixPayload]:
        return [self.matrix] if self.kernel is None else [self.matrix, self.kernel]


class Dims(BaseModel):
    n: int = Field(ge=0)
    r: int = Field(ge=0)
    m: int = Field(ge=0)


class GeometricPayload(BaseModel):
    dims: Dims
    D: RelationPayload
    L: RelationPayload
    R: RelationPayload


class DescriptorPayload(BaseModel):
    E: MatrixPayload
    J: MatrixPayload
    R: MatrixPayload
    Q: MatrixPayload
    B: MatrixPayload
    P: MatrixPayload
    S: MatrixPayload
    N: MatrixPayload


class TrajectoryPayload(BaseModel):
    grid: list[float]
    channels: dict[str, MatrixPayload]


class SystemFile(BaseModel):
    header: Header
    relation: RelationPayload | None = None
    geometric: GeometricPayload | None = None
    descriptor: DescriptorPayload | None = None
    trajectory: TrajectoryPayload | None = None
    metadata: dict[str, Any] = Field(default_factory=dict)

    def matrices(self) -> list[MatrixPayload]:
        found: list[MatrixPayload] = []
        if self.relation is not None:
            found += self.relation.matrices()
        if self.geometric is not None:
            for rel in (self.geometric.D, self.geometric.L, self.geometric.R):
                found += rel.matrices()
        if self.descriptor is not None:
            found += [getattr(self.descriptor, name) for name in DescriptorPayload.model_fields]
        if self.trajectory is not None:
            found += list(self.trajectory.channels.values())
        return found

    @model_validator(mode="after")
    def _check_consistency(self) -> SystemFile:
        payloads = {
            SystemKind.RELATION: self.relation,
            SystemKind.GEOMETRIC: self.geometric,
            SystemKind.DESCRIPTOR: self.descriptor,
            SystemKind.TRAJECTORY: self.trajectory,
        }
        if payloads[self.header.kind] is None:
            raise ValueError(f"{self.header.kind} file has no {self.header.kind} payload")
        extra = [str(k) for k, v in payloads.items() if v is not None and k != self.header.kind]
        if extra:
            raise ValueError(f"{self.header.kind} file also carries {', '.join(extra)}")
        if self.header.field is ScalarField.REAL and any(m.is_pairs for m in self.matrices()):
            raise ValueError("real file uses the [re, im] pair form")
        if self.header.field is ScalarField.COMPLEX and any(
            m.data and not m.is_pairs for m in self.matrices()
        ):
            raise ValueError("complex file stores plain numbers; use [re, im] pairs")
        return self

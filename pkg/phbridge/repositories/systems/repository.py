from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np

from phbridge.core.kinds import ScalarField, SystemKind
from phbridge.core.tolerance import TolerancePolicy
from phbridge.models.files.schemas import (
    DescriptorPayload,
    Dims,
    GeometricPayload,
    Header,
    MatrixPayload,
    RelationPayload,
    SystemFile,
    TrajectoryPayload,
)
from phbridge.relations.relation import LinearRelation
from phbridge.repositories.base import BaseFileRepository, read_document
from phbridge.systems.descriptor import MATRIX_NAMES, DescriptorPH
from phbridge.systems.geometric import GeometricPH
from phbridge.systems.trajectory import Trajectory

logger = logging.getLogger(__name__)


def _field_of(*arrays: np.ndarray) -> ScalarField:
    """Complex if any array is; relations count both of their bases."""
    if any(np.iscomplexobj(a) for a in arrays):
        return ScalarField.COMPLEX
    return ScalarField.REAL


def _document(kind: SystemKind, field: ScalarField, metadata, **payload) -> SystemFile:
    return SystemFile(
        header=Header(field=field, kind=kind), metadata=dict(metadata or {}), **payload
    )


def _relation_payload(rel: LinearRelation, field: ScalarField) -> RelationPayload:
    return RelationPayload(
        n_left=rel.n_left,
        n_right=rel.n_right,
        representation="image",
        matrix=MatrixPayload.from_array(rel.image_basis, field),
        kernel=MatrixPayload.from_array(rel.kernel_basis, field),
    )


def _relation_value(payload: RelationPayload, tol: TolerancePolicy) -> LinearRelation:
    matrix = payload.matrix.to_array()
    if payload.representation == "kernel":
        return LinearRelation.from_kernel(matrix, payload.n_left, payload.n_right, tol)
    if payload.kernel is not None:
        kernel = payload.kernel.to_array()
        # An empty block reads back as real.
        if np.iscomplexobj(matrix) or np.iscomplexobj(kernel):
            matrix, kernel = matrix.astype(complex), kernel.astype(complex)
        return LinearRelation.from_bases(matrix, kernel, payload.n_left, payload.n_right, tol)
    return LinearRelation.from_image(matrix, payload.n_left, payload.n_right, tol)


class RelationRepository(BaseFileRepository[LinearRelation]):
    KIND = SystemKind.RELATION

    def decode(self, doc: SystemFile) -> LinearRelation:
        return _relation_value(doc.relation, self._tol)

    def encode(self, value: LinearRelation, metadata: dict[str, Any] | None = None) -> SystemFile:
        field = _field_of(value.image_basis, value.kernel_basis)
        return _document(
            self.KIND, field, metadata, relation=_relation_payload(value, field)
        )


class GeometricRepository(BaseFileRepository[GeometricPH]):
    KIND = SystemKind.GEOMETRIC

    def decode(self, doc: SystemFile) -> GeometricPH:
        geo = doc.geometric
        return GeometricPH(
            n=geo.dims.n,
            r=geo.dims.r,
            m=geo.dims.m,
            D=_relation_value(geo.D, self._tol),
            L=_relation_value(geo.L, self._tol),
            R=_relation_value(geo.R, self._tol),
        )

    def encode(self, value: GeometricPH, metadata: dict[str, Any] | None = None) -> SystemFile:
        bases = [b for rel in (value.D, value.L, value.R) for b in (rel.image_basis, rel.kernel_basis)]
        field = _field_of(*bases)
        payload = GeometricPayload(
            dims=Dims(n=value.n, r=value.r, m=value.m),
            D=_relation_payload(value.D, field),
            L=_relation_payload(value.L, field),
            R=_relation_payload(value.R, field),
        )
        return _document(self.KIND, field, metadata, geometric=payload)


class DescriptorRepository(BaseFileRepository[DescriptorPH]):
    KIND = SystemKind.DESCRIPTOR

    def decode(self, doc: SystemFile) -> DescriptorPH:
        mats = {name: getattr(doc.descriptor, name).to_array() for name in MATRIX_NAMES}
        return DescriptorPH(**mats, tol=self._tol)

    def encode(self, value: DescriptorPH, metadata: dict[str, Any] | None = None) -> SystemFile:
        field = _field_of(value.E)
        payload = DescriptorPayload(
            **{
                name: MatrixPayload.from_array(matrix, field)
                for name, matrix in value.matrices().items()
            }
        )
        return _document(self.KIND, field, metadata, descriptor=payload)


class TrajectoryRepository(BaseFileRepository[Trajectory]):
    KIND = SystemKind.TRAJECTORY

    def decode(self, doc: SystemFile) -> Trajectory:
        traj = doc.trajectory
        channels = {name: payload.to_array() for name, payload in traj.channels.items()}
        return Trajectory(grid=np.asarray(traj.grid), channels=channels, metadata=doc.metadata)

    def encode(self, value: Trajectory, metadata: dict[str, Any] | None = None) -> SystemFile:
        field = _field_of(*value.channels.values())
        payload = TrajectoryPayload(
            grid=[float(t) for t in value.grid],
            channels={
                name: MatrixPayload.from_array(value.channels[name], field)
                for name in value.names
            },
        )
        merged = {**value.metadata, **(metadata or {})}
        return _document(self.KIND, field, merged, trajectory=payload)


REPOSITORIES: dict[SystemKind, type[BaseFileRepository]] = {
    SystemKind.RELATION: RelationRepository,
    SystemKind.GEOMETRIC: GeometricRepository,
    SystemKind.DESCRIPTOR: DescriptorRepository,
    SystemKind.TRAJECTORY: TrajectoryRepository,
}


def repository_for(kind: SystemKind, path: Path | str = "-", tol: TolerancePolicy | None = None):
    return REPOSITORIES[kind].from_path(path, tol)


def load_any(path: Path | str, tol: TolerancePolicy | None = None):
    """``(kind, value, document)`` for a file of any kind."""
    doc = read_document(Path(path))
    repo = repository_for(doc.header.kind, path, tol)
    logger.debug("loaded %s from %s", doc.header.kind, path)
    return doc.header.kind, repo.decode(doc), doc


def encode_any(value, metadata: dict[str, Any] | None = None) -> SystemFile:
    kinds = {
        LinearRelation: SystemKind.RELATION,
        GeometricPH: SystemKind.GEOMETRIC,
        DescriptorPH: SystemKind.DESCRIPTOR,
        Trajectory: SystemKind.TRAJECTORY,
    }
    return repository_for(kinds[type(value)]).encode(value, metadata)

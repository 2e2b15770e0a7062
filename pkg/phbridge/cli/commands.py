"""Command handlers.

Every handler receives the parsed arguments and a tolerance policy, writes
exactly one JSON document to stdout and returns the process exit status.
Library errors propagate to :func:`phbridge.main.main`, which maps them to
their ``exit_code``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import BaseModel

from phbridge.core.errors import FileFormatError
from phbridge.core.kinds import Channel, SystemKind
from phbridge.core.tolerance import TolerancePolicy
from phbridge.extension.maximal import extend_maximal_monotone, extend_maximal_resistive
from phbridge.models.files.schemas import SystemFile
from phbridge.models.reports import SimulationSummary, TransferReport
from phbridge.relations.structure import classify, classify_kernel
from phbridge.repositories.systems.repository import (
    TrajectoryRepository,
    encode_any,
    load_any,
)
from phbridge.services.experiments import simulate_roundtrip
from phbridge.services.verification import verify_solution
from phbridge.systems.balance import descriptor_power_residual
from phbridge.systems.descriptor import DescriptorPH, hamiltonians
from phbridge.systems.geometric import GeometricPH
from phbridge.transforms.desc_to_geo import descriptor_to_geometric
from phbridge.transforms.geo_to_desc import geometric_to_descriptor, project_solution
from phbridge.transforms.pencil import transfer_positive_real
from phbridge.transforms.roundtrip import compose_roundtrip
from phbridge.workers.inputs import InputSpec, SimConfig
from phbridge.workers.integrator import initial_state, integrate_implicit_euler, seeded_guess

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def emit(document: BaseModel) -> None:
    sys.stdout.write(document.model_dump_json(indent=2) + "\n")


def _load(path: str, expected: tuple[SystemKind, ...], tol: TolerancePolicy):
    kind, value, doc = load_any(path, tol)
    if kind not in expected:
        names = " or ".join(str(k) for k in expected)
        raise FileFormatError(f"{path} holds a {kind}, expected {names}")
    return kind, value, doc


def _write_or_emit(document: SystemFile, out: str | None) -> None:
    if out:
        Path(out).write_text(document.model_dump_json(indent=2))
        logger.info("wrote %s to %s", document.header.kind, out)
    else:
        emit(document)


def _sim_config(args: argparse.Namespace) -> SimConfig:
    return SimConfig(
        t_end=args.t_end,
        h=args.h,
        input=InputSpec.parse(args.input),
        seed=args.seed,
    )


# ---------------------------------------------------------------------------
# classify / extend
# ---------------------------------------------------------------------------


def cmd_classify(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    _, rel, _ = _load(args.file, (SystemKind.RELATION,), tol)
    report = classify_kernel(rel) if args.kernel else classify(rel)
    emit(report)
    return 0


def cmd_extend(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    _, rel, _ = _load(args.file, (SystemKind.RELATION,), tol)
    extend = extend_maximal_monotone if args.flavor == "monotone" else extend_maximal_resistive
    extension = extend(rel, tol)
    metadata = {"extension": args.flavor, "source_dim": rel.dim, "dim": extension.dim}
    _write_or_emit(encode_any(extension, metadata), args.out)
    return 0


# ---------------------------------------------------------------------------
# convert / roundtrip
# ---------------------------------------------------------------------------


def cmd_convert(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    kind, value, _ = _load(args.file, (SystemKind.GEOMETRIC, SystemKind.DESCRIPTOR), tol)
    if str(kind) == args.to:
        raise FileFormatError(f"{args.file} is already {kind}")

    if kind is SystemKind.GEOMETRIC:
        converted, lift = geometric_to_descriptor(value, tol)
        sidecar = {"direction": "geometric->descriptor", "lift": lift.dims(), "q_identity": True}
    else:
        converted, maps = descriptor_to_geometric(value, tol)
        sidecar = {"direction": "descriptor->geometric", "maps": maps.dims()}

    if args.sidecar:
        Path(args.sidecar).write_text(json.dumps(sidecar, indent=2))
    _write_or_emit(encode_any(converted, {"conversion": sidecar}), args.out)
    return 0


def cmd_roundtrip(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    _, dsys, _ = _load(args.file, (SystemKind.DESCRIPTOR,), tol)
    trip = compose_roundtrip(dsys, tol)
    metadata = {
        "q_identity": True,
        "original_dim": dsys.n,
        "roundtrip_dim": trip.descriptor.n,
        "geometric": trip.maps.dims(),
        "lift": trip.lift.dims(),
    }
    status = 0
    if args.simulate:
        report = simulate_roundtrip(dsys, _sim_config(args), tol)
        metadata["simulation"] = report.model_dump()
        status = 0 if report.passed else 1
    _write_or_emit(encode_any(trip.descriptor, metadata), args.out)
    return status


# ---------------------------------------------------------------------------
# simulate / verify
# ---------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    kind, value, _ = _load(args.file, (SystemKind.GEOMETRIC, SystemKind.DESCRIPTOR), tol)
    cfg = _sim_config(args)
    converted_from = None
    if kind is SystemKind.GEOMETRIC:
        dsys, lift = geometric_to_descriptor(value, tol)
        converted_from = str(kind)
    else:
        dsys = value

    guess = seeded_guess(dsys.n, cfg.seed, dsys.is_complex) if args.random_guess else None
    traj = integrate_implicit_euler(dsys, cfg, initial_state(dsys, cfg, guess, tol), tol)
    energy = hamiltonians(dsys, traj.channel(Channel.Z))
    balance = descriptor_power_residual(dsys, traj)

    if kind is SystemKind.GEOMETRIC:
        z0 = traj.channel(Channel.Z)[0]
        x0 = lift.L_mat @ z0[lift.state_slices()[Channel.E_L]]
        out_traj = project_solution(value, lift, traj, x0, tol)
    else:
        out_traj = traj

    summary = SimulationSummary(
        samples=traj.samples,
        h=traj.h,
        state_dim=dsys.n,
        converted_from=converted_from,
        initial_H=float(energy[0]),
        final_H=float(energy[-1]),
        max_power_residual=balance.max_residual,
    )
    if args.out:
        metadata = {
            "converted_from": converted_from,
            "initial_guess": "seeded" if args.random_guess else "zero",
            "seed": cfg.seed,
        }
        TrajectoryRepository.from_path(args.out, tol).save(out_traj, metadata)
    emit(summary)
    return 0


def cmd_verify(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    _, system, _ = _load(args.system, (SystemKind.GEOMETRIC, SystemKind.DESCRIPTOR), tol)
    _, traj, _ = _load(args.trajectory, (SystemKind.TRAJECTORY,), tol)
    report = verify_solution(system, traj, tol)
    emit(report)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# transfer
# ---------------------------------------------------------------------------


def cmd_transfer(args: argparse.Namespace, tol: TolerancePolicy) -> int:
    kind, value, _ = _load(args.file, (SystemKind.GEOMETRIC, SystemKind.DESCRIPTOR), tol)
    dsys: DescriptorPH = value
    if isinstance(value, GeometricPH):
        dsys, _ = geometric_to_descriptor(value, tol)
    report = transfer_positive_real(dsys, count=args.points, seed=args.seed)
    emit(TransferReport(source_kind=kind, state_dim=dsys.n, positive_real=report))
    return 0 if report.passed else 1

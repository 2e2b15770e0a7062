from __future__ import annotations

import argparse

from phbridge.cli import commands
from phbridge.core.config import settings


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rel", type=float, default=None, help="relative rank tolerance")
    common.add_argument("--tol-abs", type=float, default=None, help="absolute rank floor")
    common.add_argument(
        "--seed", type=int, default=None, help="random seed (default: PHBRIDGE_SEED or 0)"
    )
    common.add_argument("--out", default=None, help="write the result file here")
    return common


def _simulation_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--t-end", type=float, required=required, default=1.0)
    parser.add_argument("--h", type=float, required=required, default=1e-2)
    parser.add_argument(
        "--input", default="zero", help="zero | sin[:a[,w]] | poly:c0,c1,... | @spec.json"
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="phbridge",
        description="Linear relations and port-Hamiltonian system conversions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="structure verdicts of a relation")
    p.add_argument("file")
    p.add_argument("--kernel", action="store_true", help="decide from the kernel representation")
    p.set_defaults(handler=commands.cmd_classify)

    p = sub.add_parser("extend", parents=[common], help="maximal extension of a relation")
    p.add_argument("file")
    p.add_argument("--flavor", choices=("monotone", "resistive"), default="monotone")
    p.set_defaults(handler=commands.cmd_extend)

    p = sub.add_parser("convert", parents=[common], help="geometric <-> descriptor")
    p.add_argument("file")
    p.add_argument("--to", choices=("descriptor", "geometric"), required=True)
    p.add_argument("--sidecar", default=None, help="write conversion dimensions here")
    p.set_defaults(handler=commands.cmd_convert)

    p = sub.add_parser("simulate", parents=[common], help="implicit Euler simulation")
    p.add_argument("file")
    _simulation_flags(p, required=True)
    p.add_argument(
        "--random-guess",
        action="store_true",
        help="start the consistent projection from a unit vector drawn with --seed",
    )
    p.set_defaults(handler=commands.cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="check a trajectory against a system")
    p.add_argument("system")
    p.add_argument("trajectory")
    p.set_defaults(handler=commands.cmd_verify)

    p = sub.add_parser("roundtrip", parents=[common], help="descriptor -> geometric -> descriptor")
    p.add_argument("file")
    p.add_argument("--simulate", action="store_true", help="compare simulated outputs")
    _simulation_flags(p, required=False)
    p.set_defaults(handler=commands.cmd_roundtrip)

    p = sub.add_parser("transfer", parents=[common], help="positive-real sampling of G(s)")
    p.add_argument("file")
    p.add_argument("--points", type=int, default=100)
    p.set_defaults(handler=commands.cmd_transfer)

    return parser


def resolve_seed(args: argparse.Namespace) -> None:
    if args.seed is None:
        args.seed = settings.seed

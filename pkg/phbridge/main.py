from __future__ import annotations

import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from phbridge.cli.router import build_parser, resolve_seed
from phbridge.core.config import settings
from phbridge.core.errors import PhBridgeError
from phbridge.core.tolerance import TolerancePolicy
from phbridge.models.reports import ErrorReport

logger = logging.getLogger(__name__)


def _configure_logging() -> None:
    """Configure the ``phbridge`` logger namespace.

    Diagnostics go to stderr so stdout carries exactly one JSON document.
    ``propagate = False`` keeps records away from any root handlers an
    embedding application installs.
    """
    level = getattr(logging, settings.log_level.upper(), logging.INFO)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        logging.Formatter("%(asctime)s %(levelname)-8s %(name)s: %(message)s")
    )
    app_log = logging.getLogger("phbridge")
    app_log.setLevel(level)
    if not app_log.handlers:
        app_log.addHandler(handler)
    app_log.propagate = False


_configure_logging()


def _policy(args) -> TolerancePolicy:
    base = TolerancePolicy.from_settings()
    updates = {}
    if args.tol_rel is not None:
        updates["rel_eps"] = args.tol_rel
    if args.tol_abs is not None:
        updates["abs_floor"] = args.tol_abs
    return TolerancePolicy(**{**base.model_dump(), **updates})


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit status.

    - **0** success (``verify``: every residual within tolerance)
    - **1** residual failure
    - **2** parse, shape or file-format error
    - **3** ``ker E ∩ ker Q ≠ {0}``
    - **4** an extension or representation failed verification
    - **5** singular pencil or inconsistent algebraic constraints
    - **6** other structural precondition failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    resolve_seed(args)

    try:
        return args.handler(args, _policy(args))
    except PhBridgeError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        report = ErrorReport(error=type(exc).__name__, detail=str(exc), exit_code=exc.exit_code)
        sys.stderr.write(report.model_dump_json() + "\n")
        return exc.exit_code
    except ValidationError as exc:
        # --t-end, --h and tolerance flags are validated by pydantic
        logger.error("invalid arguments: %s", exc)
        return 2

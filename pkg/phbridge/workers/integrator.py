"""Implicit Euler for pH descriptor systems.

Each step solves

    (E - h (J-R) Q) z_{k+1} = E z_k + h (B-P) u_{k+1}

with one LU factorization reused across the whole run.  If the iteration
matrix is singular at ``h`` (``1/h`` is a pencil eigenvalue) the run is
retried once at ``h/2``.

Initial states are projected onto the explicit and hidden algebraic
constraints, the latter read off the derivative array
``E z^(j+1) - (J-R)Q z^(j) = (B-P) u^(j)``.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg as spla
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt

from phbridge.core.errors import InconsistentConstraints, IrregularPencil
from phbridge.core.kinds import Channel
from phbridge.core.tolerance import TolerancePolicy
from phbridge.relations.kernel import (
    as_vector,
    herm,
    left_null,
    pseudo_inverse,
    rank_factor,
    result_dtype,
    spectral_norm,
)
from phbridge.systems.balance import constraint_matrix
from phbridge.systems.descriptor import DescriptorPH
from phbridge.systems.trajectory import Trajectory
from phbridge.transforms.pencil import pencil_regular
from phbridge.workers.inputs import SimConfig

logger = logging.getLogger(__name__)


class ConstraintArray(NamedTuple):
    """Consistent initial states satisfy ``matrix @ z0 = forcing @ [u; u'; ...]``."""

    matrix: np.ndarray
    forcing: np.ndarray
    depth: int


def _derivative_array(sys: DescriptorPH, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Blocks of ``E z^(j+1) - A z^(j) = (B-P) u^(j)`` for ``j = 0..depth``.

    Returns the columns acting on ``z`` and those acting on
    ``z', ..., z^(depth+1)``.
    """
    n = sys.n
    size = (depth + 1) * n
    dtype = result_dtype(sys.E, sys.A)
    state = np.zeros((size, n), dtype=dtype)
    higher = np.zeros((size, size), dtype=dtype)
    state[:n] = -sys.A
    for j in range(depth + 1):
        rows = slice(j * n, (j + 1) * n)
        higher[rows, j * n : (j + 1) * n] = sys.E
        if j:
            higher[rows, (j - 1) * n : j * n] = -sys.A
    return state, higher


def constraint_array(sys: DescriptorPH, tol: TolerancePolicy | None = None) -> ConstraintArray:
    """Explicit and hidden algebraic constraints on ``z(0)``.

    The derivative array is extended until it determines ``z'`` from ``z``
    and the input derivatives; its left null space then yields every
    constraint a solution must meet at ``t = 0``, including those that only
    appear after differentiating the algebraic rows.

    Raises:
        IrregularPencil: no depth up to ``n`` determines ``z'``.
    """
    tol = tol or sys.tol
    for depth in range(sys.n + 1):
        state, higher = _derivative_array(sys, depth)
        free = rank_factor(higher, tol).null_basis
        if spectral_norm(free[: sys.n]) > tol.check:
            continue
        rows = herm(left_null(higher, tol))
        forcing = rows @ np.kron(np.eye(depth + 1), sys.input_matrix)
        return ConstraintArray(rows @ state, forcing, depth)
    raise IrregularPencil("derivative array never determines z'; the pencil is singular")


def _project(c: np.ndarray, target: np.ndarray, guess: np.ndarray, tol: TolerancePolicy):
    if not c.shape[0]:
        return guess
    z0 = guess + pseudo_inverse(c, tol) @ (target - c @ guess)
    residual = float(np.linalg.norm(c @ z0 - target))
    scale = max(1.0, float(np.linalg.norm(target)))
    if residual > tol.check * scale:
        raise InconsistentConstraints(f"algebraic constraints at t=0 leave residual {residual:.3e}")
    return z0


def _input_stack(u0: np.ndarray, rates, depth: int, m: int) -> np.ndarray:
    if rates is None or m == 0:
        rates = np.zeros((0, m))
    else:
        rates = np.asarray(rates).reshape(-1, m)[:depth]
    stack = np.zeros((depth + 1, m), dtype=result_dtype(u0, rates))
    stack[0] = u0
    stack[1 : 1 + rates.shape[0]] = rates
    return stack.reshape(-1)


def consistent_init(
    sys: DescriptorPH,
    u0,
    z_guess=None,
    tol: TolerancePolicy | None = None,
    input_rates=None,
) -> np.ndarray:
    """Closest ``z0`` to ``z_guess`` from which a solution starts.

    Besides the explicit rows ``N_E* ((J-R)Q z0 + (B-P) u0) = 0`` (``N_E``
    spanning the left null space of ``E``) this enforces the hidden
    constraints of :func:`constraint_array`.  ``input_rates`` holds
    ``u'(0), u''(0), ...`` row by row; missing rows count as zero.

    Raises:
        InconsistentConstraints: no ``z0`` satisfies the rows.
        IrregularPencil: ``(E, (J-R)Q)`` is singular.
    """
    tol = tol or sys.tol
    u0 = as_vector(u0, sys.m, name="u0")
    guess = np.zeros(sys.n) if z_guess is None else as_vector(z_guess, sys.n, name="z_guess")
    dtype = result_dtype(sys.E, u0, guess)
    guess = guess.astype(dtype)

    c, d_in = constraint_matrix(sys)
    _project(c, -(d_in @ u0), guess, tol)
    if not pencil_regular(sys.E, sys.A, tol).regular:
        raise IrregularPencil("pencil (E, (J-R)Q) is singular; solutions are not unique")

    array = constraint_array(sys, tol)
    target = array.forcing @ _input_stack(u0, input_rates, array.depth, sys.m)
    z0 = _project(array.matrix, target, guess, tol)
    logger.debug(
        "consistent_init: %d constraint rows at depth %d, moved %.3e",
        array.matrix.shape[0], array.depth, float(np.linalg.norm(z0 - guess)),
    )
    return z0


def seeded_guess(n: int, seed: int, complex_field: bool = False) -> np.ndarray:
    """Unit-norm random starting point for :func:`consistent_init`."""
    rng = np.random.default_rng(seed)
    guess = rng.standard_normal(n)
    if complex_field:
        guess = guess + 1j * rng.standard_normal(n)
    norm = np.linalg.norm(guess)
    return guess / norm if norm else guess


def initial_state(
    sys: DescriptorPH, cfg: SimConfig, z_guess=None, tol: TolerancePolicy | None = None
) -> np.ndarray:
    """:func:`consistent_init` at ``t = 0`` for the input of ``cfg``."""
    u = cfg.input.derivatives(0.0, sys.m, sys.n)
    return consistent_init(sys, u[0], z_guess, tol, input_rates=u[1:])


def _march(sys: DescriptorPH, cfg: SimConfig, h: float, z0: np.ndarray) -> Trajectory:
    grid = cfg.grid(h)
    u = cfg.input.evaluate(grid, sys.m)
    iteration = sys.E - h * sys.A
    if sys.n:
        s = spla.svdvals(iteration, check_finite=False)
        if s[-1] <= sys.tol.threshold(s[0], sys.n, sys.n):
            raise IrregularPencil(f"iteration matrix E - h(J-R)Q is singular at h = {h:g}")
        lu = spla.lu_factor(iteration, check_finite=False)

    dtype = result_dtype(sys.E, z0)
    z = np.zeros((grid.size, sys.n), dtype=dtype)
    z[0] = z0
    drive = h * (u @ sys.input_matrix.T)
    for k in range(grid.size - 1):
        if sys.n:
            z[k + 1] = spla.lu_solve(lu, sys.E @ z[k] + drive[k + 1], check_finite=False)

    y = z @ sys.output_matrix.T + u @ sys.feedthrough.T
    return Trajectory(
        grid=grid,
        channels={Channel.Z: z, Channel.U: u, Channel.Y: y},
        metadata={"integrator": "implicit_euler", "h": h},
    )


def integrate_implicit_euler(
    sys: DescriptorPH, cfg: SimConfig, z0=None, tol: TolerancePolicy | None = None
) -> Trajectory:
    """Implicit-Euler trajectory carrying ``z``, ``u`` and ``y``.

    ``z0`` defaults to :func:`initial_state` from a zero guess.

    Raises:
        IrregularPencil: the iteration matrix is singular at ``h`` and ``h/2``.
    """
    tol = tol or sys.tol
    if z0 is None:
        z0 = initial_state(sys, cfg, tol=tol)
    z0 = as_vector(z0, sys.n, name="z0")

    for attempt in Retrying(
        retry=retry_if_exception_type(IrregularPencil),
        stop=stop_after_attempt(2),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    ):
        with attempt:
            h = cfg.h / 2 ** (attempt.retry_state.attempt_number - 1)
            traj = _march(sys, cfg, h, z0)
    logger.debug("integrated %d steps at h = %g", traj.samples - 1, traj.h)
    return traj

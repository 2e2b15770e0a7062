"""Port-Hamiltonian descriptor systems.

    d/dt (E z) = (J - R) Q z + (B - P) u
             y = (B + P)* Q z + (S + N) u

with ``E*Q = Q*E``, ``J = -J*``, ``N = -N*`` and the dissipation matrix
``W = diag(Q*, I) [[R, P], [P*, S]] diag(Q, I)`` positive semidefinite.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel

from phbridge.core.errors import NotDescriptor, ShapeError
from phbridge.core.tolerance import TolerancePolicy, default_policy
from phbridge.relations.kernel import as_matrix, as_vector, eig_extremes, herm, result_dtype

logger = logging.getLogger(__name__)

MATRIX_NAMES = ("E", "J", "R", "Q", "B", "P", "S", "N")


def _frozen(a: np.ndarray, dtype: np.dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DescriptorPH:
    E: np.ndarray
    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    P: np.ndarray
    S: np.ndarray
    N: np.ndarray
    tol: TolerancePolicy = field(default_factory=default_policy)

    def __post_init__(self) -> None:
        mats = {name: as_matrix(getattr(self, name), name=name) for name in MATRIX_NAMES}
        n = mats["E"].shape[0]
        m = mats["B"].shape[1]
        expected = {
            "E": (n, n), "J": (n, n), "R": (n, n), "Q": (n, n),
            "B": (n, m), "P": (n, m), "S": (m, m), "N": (m, m),
        }
        for name, shape in expected.items():
            if mats[name].shape != shape:
                raise ShapeError(f"{name} has shape {mats[name].shape}, expected {shape}")
        dtype = result_dtype(*mats.values())
        for name, value in mats.items():
            object.__setattr__(self, name, _frozen(value, dtype))

    @classmethod
    def build(
        cls,
        E,
        J,
        R,
        Q,
        B,
        P=None,
        S=None,
        N=None,
        tol: TolerancePolicy | None = None,
    ) -> DescriptorPH:
        """Construct with ``P``, ``S``, ``N`` defaulting to zero blocks."""
        B = as_matrix(B, name="B")
        n, m = B.shape
        return cls(
            E=E,
            J=J,
            R=R,
            Q=Q,
            B=B,
            P=np.zeros((n, m)) if P is None else P,
            S=np.zeros((m, m)) if S is None else S,
            N=np.zeros((m, m)) if N is None else N,
            tol=tol or default_policy(),
        )

    @property
    def n(self) -> int:
        return self.E.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.E)

    @property
    def A(self) -> np.ndarray:
        """State matrix ``(J - R) Q``."""
        return (self.J - self.R) @ self.Q

    @property
    def input_matrix(self) -> np.ndarray:
        return self.B - self.P

    @property
    def output_matrix(self) -> np.ndarray:
        return herm(self.B + self.P) @ self.Q

    @property
    def feedthrough(self) -> np.ndarray:
        return self.S + self.N

    def matrices(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in MATRIX_NAMES}

    def __repr__(self) -> str:
        return f"DescriptorPH(n={self.n}, m={self.m}, complex={self.is_complex})"


class DescriptorReport(BaseModel):
    n: int
    m: int
    eq_residual: float
    j_skew_residual: float
    n_skew_residual: float
    r_hermitian_residual: float
    s_hermitian_residual: float
    min_eig_W: float
    passed: bool


def dissipation_block(sys: DescriptorPH) -> np.ndarray:
    """``W₀ = [[R, P], [P*, S]]``, the dissipation matrix before the Q congruence."""
    return np.block([[sys.R, sys.P], [herm(sys.P), sys.S]])


def compute_W(sys: DescriptorPH) -> np.ndarray:
    """``W = diag(Q*, I) W₀ diag(Q, I)``, symmetrized."""
    lift = np.zeros((sys.n + sys.m, sys.n + sys.m), dtype=sys.Q.dtype)
    lift[: sys.n, : sys.n] = sys.Q
    lift[sys.n :, sys.n :] = np.eye(sys.m)
    w = herm(lift) @ dissipation_block(sys) @ lift
    return (w + herm(w)) / 2


def _half_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a) / 2)


def validate_descriptor(sys: DescriptorPH, tol: float | None = None) -> DescriptorReport:
    """Per-condition residuals (Frobenius norms of the offending parts)."""
    tol = sys.tol.check if tol is None else tol
    eq = herm(sys.E) @ sys.Q
    min_eig, _ = eig_extremes(compute_W(sys))
    residuals = {
        "eq_residual": _half_norm(eq - herm(eq)),
        "j_skew_residual": _half_norm(sys.J + herm(sys.J)),
        "n_skew_residual": _half_norm(sys.N + herm(sys.N)),
        "r_hermitian_residual": _half_norm(sys.R - herm(sys.R)),
        "s_hermitian_residual": _half_norm(sys.S - herm(sys.S)),
    }
    passed = all(v <= tol for v in residuals.values()) and min_eig >= -tol
    report = DescriptorReport(n=sys.n, m=sys.m, min_eig_W=min_eig, passed=passed, **residuals)
    logger.debug("validate_descriptor: %s", report)
    return report


def require_descriptor(sys: DescriptorPH, tol: float | None = None) -> DescriptorReport:
    report = validate_descriptor(sys, tol)
    if not report.passed:
        raise NotDescriptor(f"not a pH descriptor system: {report.model_dump()}")
    return report


def hamiltonian(sys: DescriptorPH, z) -> float:
    """``H(z) = ½ z* Q* E z``.

    Raises:
        ShapeError: ``z`` does not have length ``n``.
    """
    z = as_vector(z, sys.n, name="z")
    value = 0.5 * np.vdot(sys.Q @ z, sys.E @ z)
    if abs(value.imag) > sys.tol.check * max(1.0, float(np.vdot(z, z).real)):
        logger.warning("Hamiltonian has imaginary part %.3e", value.imag)
    return float(value.real)


def hamiltonians(sys: DescriptorPH, zs: np.ndarray) -> np.ndarray:
    """Row-wise :func:`hamiltonian` for a ``(samples, n)`` array."""
    zs = np.atleast_2d(zs)
    if zs.shape[1] != sys.n:
        raise ShapeError(f"state samples have width {zs.shape[1]}, expected {sys.n}")
    qz = zs @ sys.Q.T
    ez = zs @ sys.E.T
    return 0.5 * np.real(np.sum(qz.conj() * ez, axis=1))

"""Seeded constructors for structured relations and systems used across the suite."""

from __future__ import annotations

import numpy as np
import scipy.linalg as spla

from phbridge.core.kinds import Channel, GraphFlavor
from phbridge.extension.graph_rep import ExtendedGraphRep
from phbridge.relations.relation import LinearRelation, graph, inverse_graph
from phbridge.systems.descriptor import DescriptorPH
from phbridge.systems.geometric import GeometricPH
from phbridge.systems.trajectory import Trajectory
from phbridge.transforms.geo_to_desc import geometric_to_descriptor
from phbridge.transforms.pencil import pencil_regular


def random_matrix(rng: np.random.Generator, rows: int, cols: int, complex_field=False):
    a = rng.standard_normal((rows, cols))
    if complex_field:
        a = a + 1j * rng.standard_normal((rows, cols))
    return a


def random_orthonormal(rng, n: int, k: int, complex_field=False) -> np.ndarray:
    if k == 0:
        return np.zeros((n, 0), dtype=complex if complex_field else float)
    q, _ = np.linalg.qr(random_matrix(rng, n, k, complex_field))
    return q


def random_structured(
    rng, n: int, flavor: GraphFlavor, kernel_dim: int = 0, complex_field=False
) -> LinearRelation:
    """A maximal relation ``{(M e - G λ, e) : G* e = 0}`` of the given flavor."""
    g = random_orthonormal(rng, n, kernel_dim, complex_field)
    proj = np.eye(n) - g @ g.conj().T
    k = random_matrix(rng, n, n, complex_field)
    core = {
        GraphFlavor.DIRAC: k - k.conj().T,
        GraphFlavor.LAGRANGE: k + k.conj().T,
        GraphFlavor.MAX_RESISTIVE: -(k @ k.conj().T),
        GraphFlavor.MAX_MONOTONE: k @ k.conj().T + (k - k.conj().T),
    }[flavor]
    m = proj @ core @ proj
    return ExtendedGraphRep(flavor=flavor, M=m, G=g).relation()


def random_descriptor(
    rng, n: int, m: int, complex_field=False, singular_e=True, singular_q=False
) -> DescriptorPH:
    """Valid pH descriptor system with ``ker E ∩ ker Q = {0}``.

    ``E = Q^{-*} H`` for a Hermitian PSD ``H`` of rank ``n - 1`` (or ``n``),
    so ``E*Q = H`` is Hermitian.  With ``singular_q`` (``n ≥ 2``) the last
    ``1 ≤ s < n`` coordinates form ``ker Q``, ``E`` is injective on them and the whole
    system is rotated by a random unitary.
    """
    s = int(rng.integers(1, n)) if singular_q else 0
    n1 = n - s
    q1 = random_matrix(rng, n1, n1, complex_field) + 3 * np.eye(n1)
    half = random_matrix(rng, n1, n1 - 1 if singular_e and n1 > 1 else n1, complex_field)
    dtype = complex if complex_field else float
    q = np.zeros((n, n), dtype=dtype)
    e = np.zeros((n, n), dtype=dtype)
    q[:n1, :n1] = q1
    e[:n1, :n1] = np.linalg.solve(q1.conj().T, half @ half.conj().T)
    if s:
        e[n1:, :n1] = random_matrix(rng, s, n1, complex_field)
        e[n1:, n1:] = random_matrix(rng, s, s, complex_field) + 3 * np.eye(s)
    k = random_matrix(rng, n, n, complex_field)
    c = random_matrix(rng, n + m, n + m, complex_field)
    w0 = c @ c.conj().T / (n + m)
    nk = random_matrix(rng, m, m, complex_field)
    b = random_matrix(rng, n, m, complex_field)
    j, r, p = k - k.conj().T, w0[:n, :n], w0[:n, n:]
    if s:
        u = random_orthonormal(rng, n, n, complex_field)
        uh = u.conj().T
        e, j, r, q, b, p = uh @ e @ u, uh @ j @ u, uh @ r @ u, uh @ q @ u, uh @ b, uh @ p
    return DescriptorPH(E=e, J=j, R=r, Q=q, B=b, P=p, S=w0[n:, n:], N=nk - nk.conj().T)


def monotone_sample_min(rel: LinearRelation, samples: int = 64, seed: int = 0) -> float:
    """Smallest ``Re⟨e, f⟩ / ‖(e, f)‖²`` over basis vectors and random members."""
    if rel.dim == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    coeffs = np.hstack([np.eye(rel.dim), rng.standard_normal((rel.dim, samples))])
    if rel.is_complex:
        coeffs = coeffs + 1j * np.hstack(
            [np.zeros((rel.dim, rel.dim)), rng.standard_normal((rel.dim, samples))]
        )
    members = rel.image_basis @ coeffs
    first, second = members[: rel.n_left], members[rel.n_left :]
    forms = np.real(np.sum(first.conj() * second, axis=0))
    return float(np.min(forms / np.sum(np.abs(members) ** 2, axis=0)))


# ── The scalar worked example ───────────────────────────────────────────────

SCALAR_J_TILDE = np.array([[0.0, 1.0, 1.0], [-1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])


def scalar_geometric(r0: float = 1.0) -> GeometricPH:
    """``n = r = m = 1``: ``(-ẋ, f_R, y) = J̃ (e_L, e_R, u)``, ``f_R = -r₀ e_R``, ``x = e_L``."""
    return GeometricPH(
        n=1,
        r=1,
        m=1,
        D=inverse_graph(SCALAR_J_TILDE),
        L=graph(np.array([[1.0]])),
        R=inverse_graph(np.array([[-r0]])),
    )


def scalar_descriptor() -> DescriptorPH:
    """``ż = -z + u``, ``y = z`` with ``E = Q = R = B = 1``."""
    one = np.array([[1.0]])
    return DescriptorPH.build(E=one, J=np.zeros((1, 1)), R=one, Q=one, B=one)


def lossless_descriptor() -> DescriptorPH:
    """Closed oscillator ``E = Q = I``, ``J = [[0, 1], [-1, 0]]``, ``R = 0``, ``B = 0``."""
    return DescriptorPH.build(
        E=np.eye(2),
        J=np.array([[0.0, 1.0], [-1.0, 0.0]]),
        R=np.zeros((2, 2)),
        Q=np.eye(2),
        B=np.zeros((2, 1)),
    )


def scalar_geometric_solution(grid: np.ndarray, r0: float = 1.0) -> Trajectory:
    """Exact free response of :func:`scalar_geometric` from ``x(0) = 1``."""
    e_l = np.exp(-grid / r0)
    e_r = e_l / r0
    return Trajectory(
        grid=grid,
        channels={
            Channel.X: e_l,
            Channel.X_DOT: -e_r,
            Channel.E_L: e_l,
            Channel.E_R: e_r,
            Channel.F_R: -r0 * e_r,
            Channel.U: np.zeros_like(grid),
            Channel.Y: -e_l,
        },
    )


def scalar_descriptor_solution(grid: np.ndarray) -> Trajectory:
    """Exact free response of :func:`scalar_descriptor` from ``z(0) = 1``."""
    z = np.exp(-grid)
    return Trajectory(
        grid=grid,
        channels={Channel.Z: z, Channel.U: np.zeros_like(grid), Channel.Y: z},
    )


def random_geometric(rng, n: int, r: int, m: int, complex_field=False, psd_lagrange=False):
    """Random ``(D, L, R)`` triple with kernel parts of random sizes."""
    size = n + r + m
    lagrange = random_structured(rng, n, GraphFlavor.LAGRANGE, int(rng.integers(0, n)), complex_field)
    if psd_lagrange:
        g = random_orthonormal(rng, n, int(rng.integers(0, n)), complex_field)
        proj = np.eye(n) - g @ g.conj().T
        k = random_matrix(rng, n, n, complex_field)
        lagrange = ExtendedGraphRep(
            flavor=GraphFlavor.LAGRANGE, M=proj @ k @ k.conj().T @ proj, G=g
        ).relation()
    return GeometricPH(
        n=n,
        r=r,
        m=m,
        D=random_structured(rng, size, GraphFlavor.DIRAC, int(rng.integers(0, size)), complex_field),
        L=lagrange,
        R=random_structured(rng, r, GraphFlavor.MAX_RESISTIVE, int(rng.integers(0, r)), complex_field),
    )


def _hermitian(rng, n: int, low: float, high: float, complex_field=False) -> np.ndarray:
    v = random_orthonormal(rng, n, n, complex_field)
    return (v * rng.uniform(low, high, n)) @ v.conj().T


def _compressed(core: np.ndarray, g: np.ndarray) -> np.ndarray:
    proj = np.eye(core.shape[0]) - g @ g.conj().T
    return proj @ core @ proj


def regular_geometric(rng, n: int, r: int, m: int, complex_field=False, attempts: int = 500):
    """Random triple whose descriptor form has a regular, well-conditioned pencil.

    ``L`` has eigenvalues in ``[1, 2]`` off its kernel part (so the energy is
    positive semidefinite), ``R`` eigenvalues in ``[-1, -0.5]`` and the Dirac
    core norm at most one.  Draws are rejected until the Dirac constraint
    acts on the state and resistive ports with singular values ≥ 0.6,
    ``σ_min(E - A) ≥ 0.05`` for the converted pencil and its finite
    eigenvalues have modulus at most 3.
    """
    size = n + r + m
    for _ in range(attempts):
        g_d = random_orthonormal(rng, size, int(rng.integers(0, n + r + 1)), complex_field)
        if g_d.shape[1] and np.linalg.svd(g_d[: n + r], compute_uv=False).min() < 0.6:
            continue
        skew = random_matrix(rng, size, size, complex_field)
        skew = skew - skew.conj().T
        skew /= max(1.0, np.linalg.norm(skew, 2))
        g_l = random_orthonormal(rng, n, int(rng.integers(0, n)), complex_field)
        g_r = random_orthonormal(rng, r, int(rng.integers(0, r)), complex_field)
        gph = GeometricPH(
            n=n,
            r=r,
            m=m,
            D=ExtendedGraphRep(
                flavor=GraphFlavor.DIRAC, M=_compressed(skew, g_d), G=g_d
            ).relation(),
            L=ExtendedGraphRep(
                flavor=GraphFlavor.LAGRANGE,
                M=_compressed(_hermitian(rng, n, 1.0, 2.0, complex_field), g_l),
                G=g_l,
            ).relation(),
            R=ExtendedGraphRep(
                flavor=GraphFlavor.MAX_RESISTIVE,
                M=-_compressed(_hermitian(rng, r, 0.5, 1.0, complex_field), g_r),
                G=g_r,
            ).relation(),
        )
        dsys, _ = geometric_to_descriptor(gph)
        if not pencil_regular(dsys.E, dsys.A).regular:
            continue
        if np.linalg.svd(dsys.E - dsys.A, compute_uv=False).min() < 0.05:
            continue
        alpha, beta = np.abs(spla.eigvals(dsys.A, dsys.E, homogeneous_eigvals=True))
        if not np.any((alpha > 3 * beta) & (beta > 1e-8 * alpha)):
            return gph
    raise AssertionError(f"no regular ({n}, {r}, {m}) triple in {attempts} draws")

from __future__ import annotations

import numpy as np
import pytest

from phbridge.core.errors import (
    IndefiniteDissipation,
    InconsistentInitial,
    InvalidParameter,
    IrregularPencil,
    KernelOverlap,
    NoConsistentZ,
    NotGeometric,
    NotMember,
    ResidualTooLarge,
    ShapeError,
    SingularShift,
)
from phbridge.core.kinds import Channel
from phbridge.core.tolerance import trajectory_tol
from phbridge.relations.kernel import eig_extremes
from phbridge.relations.relation import LinearRelation, graph
from phbridge.relations.structure import classify
from phbridge.services.verification import verify_solution
from phbridge.systems.descriptor import DescriptorPH, validate_descriptor
from phbridge.systems.geometric import membership_residuals, validate_geometric
from phbridge.systems.trajectory import Trajectory
from phbridge.transforms.desc_to_geo import (
    desc_solution_to_geo,
    descriptor_to_geometric,
    geo_solution_to_desc,
    kernel_overlap,
    port_permutation,
)
from phbridge.transforms.geo_to_desc import geometric_to_descriptor, lift_solution, project_solution
from phbridge.transforms.pencil import pencil_regular, transfer_function, transfer_positive_real
from phbridge.transforms.roundtrip import compose_roundtrip, roundtrip_q_identity
from phbridge.workers.inputs import InputSpec, SimConfig
from phbridge.workers.integrator import integrate_implicit_euler
from tests.builders import (
    random_descriptor,
    random_geometric,
    scalar_descriptor_solution,
    scalar_geometric,
    scalar_geometric_solution,
)

GRID = np.linspace(0.0, 1.0, 101)


# ---------------------------------------------------------------------------
# Geometric -> descriptor
# ---------------------------------------------------------------------------


class TestGeometricToDescriptor:
    def test_scalar_example_blocks(self):
        dsys, lift = geometric_to_descriptor(scalar_geometric(r0=2.0))
        assert lift.dims() == {
            "n": 1, "r": 1, "m": 1, "d": 0, "k": 0, "l": 0, "p": 0, "state_dim": 2
        }
        assert np.allclose(dsys.E, np.diag([1.0, 0.0]))
        assert np.allclose(dsys.J, [[0.0, -1.0], [1.0, 0.0]])
        assert np.allclose(dsys.R, np.diag([0.0, 2.0]))
        assert np.allclose(dsys.B, [[-1.0], [0.0]])
        assert np.allclose(dsys.N, 0)
        assert np.array_equal(dsys.Q, np.eye(2))

    @pytest.mark.parametrize("complex_field", [False, True])
    def test_random_triples_give_valid_descriptor_systems(self, rng, complex_field):
        for _ in range(20):
            n, r, m = (int(v) for v in rng.integers(1, 4, size=3))
            gph = random_geometric(rng, n, r, m, complex_field)
            dsys, lift = geometric_to_descriptor(gph)
            assert validate_descriptor(dsys).passed
            assert dsys.n == n + r + lift.p
            assert np.array_equal(dsys.Q, np.eye(dsys.n))

    def test_positive_lagrange_structure_gives_positive_E(self, rng):
        for _ in range(20):
            gph = random_geometric(rng, 3, 2, 1, psd_lagrange=True)
            dsys, _ = geometric_to_descriptor(gph)
            assert eig_extremes(dsys.E)[0] >= -1e-10

    def test_many_seeds_give_valid_descriptor_systems(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n, r, m = (int(v) for v in rng.integers(1, 4, size=3))
            gph = random_geometric(rng, n, r, m, bool(seed % 2), psd_lagrange=bool(seed % 3 == 0))
            dsys, lift = geometric_to_descriptor(gph)
            assert validate_descriptor(dsys).passed, seed
            assert dsys.n == n + r + lift.p, seed
            if seed % 3 == 0:
                assert eig_extremes(dsys.E)[0] >= -1e-9, seed

    def test_invalid_triple_rejected(self):
        with pytest.raises(NotGeometric):
            geometric_to_descriptor(scalar_geometric(r0=-1.0))


class TestSolutionMaps:
    def test_lift_of_scalar_solution(self, scalar_geo):
        _, lift = geometric_to_descriptor(scalar_geo)
        traj = scalar_geometric_solution(GRID)
        lifted = lift_solution(scalar_geo, lift, traj)
        z = lifted.channel(Channel.Z)
        assert z.shape == (GRID.size, 2)
        assert np.allclose(z[:, 0], traj.channel(Channel.E_L)[:, 0])
        assert np.allclose(z[:, 1], traj.channel(Channel.E_R)[:, 0])

    def test_project_reproduces_state(self, scalar_geo):
        _, lift = geometric_to_descriptor(scalar_geo)
        traj = scalar_geometric_solution(GRID)
        back = project_solution(scalar_geo, lift, lift_solution(scalar_geo, lift, traj), [1.0])
        assert np.allclose(back.channel(Channel.X), traj.channel(Channel.X), atol=1e-12)
        assert np.allclose(back.channel(Channel.F_R), traj.channel(Channel.F_R), atol=1e-12)
        assert np.allclose(back.channel(Channel.X_DOT), traj.channel(Channel.X_DOT), atol=1e-12)

    def test_project_rejects_inconsistent_initial_state(self, scalar_geo):
        _, lift = geometric_to_descriptor(scalar_geo)
        lifted = lift_solution(scalar_geo, lift, scalar_geometric_solution(GRID))
        with pytest.raises(InconsistentInitial):
            project_solution(scalar_geo, lift, lifted, [2.0])

    def test_project_checks_state_width(self, scalar_geo):
        _, lift = geometric_to_descriptor(scalar_geo)
        traj = Trajectory(
            grid=GRID,
            channels={Channel.Z: np.zeros((GRID.size, 3)), Channel.U: 0 * GRID, Channel.Y: 0 * GRID},
        )
        with pytest.raises(ShapeError):
            project_solution(scalar_geo, lift, traj, [0.0])

    def test_lift_rejects_non_solutions(self, scalar_geo):
        _, lift = geometric_to_descriptor(scalar_geo)
        traj = scalar_geometric_solution(GRID)
        broken = traj.with_channels(**{Channel.Y: 2 * traj.channel(Channel.Y)})
        with pytest.raises(NotMember, match="D"):
            lift_solution(scalar_geo, lift, broken)


# ---------------------------------------------------------------------------
# Descriptor -> geometric
# ---------------------------------------------------------------------------


class TestDescriptorToGeometric:
    def test_scalar_example(self, scalar_desc):
        gph, maps = descriptor_to_geometric(scalar_desc)
        assert maps.dims() == {"n": 1, "r": 2, "m": 1}
        assert gph.L.gap(graph(np.eye(1))) <= 1e-12
        assert gph.R.gap(graph(-np.diag([1.0, 0.0]))) <= 1e-12
        assert gph.D.dim == 4
        assert validate_geometric(gph).passed

    def test_singular_E_gives_effort_axis(self):
        dsys = DescriptorPH.build(
            E=np.zeros((2, 2)),
            J=np.array([[0.0, 1.0], [-1.0, 0.0]]),
            R=np.eye(2),
            Q=np.eye(2),
            B=np.ones((2, 1)),
        )
        gph, _ = descriptor_to_geometric(dsys)
        effort_axis = LinearRelation.from_image(np.vstack([np.zeros((2, 2)), np.eye(2)]), 2, 2)
        assert gph.L.gap(effort_axis) <= 1e-12
        assert classify(gph.L).is_lagrange

    def test_kernel_overlap_rejected(self):
        dsys = DescriptorPH.build(
            E=np.zeros((1, 1)), J=np.zeros((1, 1)), R=np.eye(1), Q=np.zeros((1, 1)), B=np.ones((1, 1))
        )
        assert kernel_overlap(dsys) == 1
        with pytest.raises(KernelOverlap):
            descriptor_to_geometric(dsys)

    def test_indefinite_dissipation_block_rejected(self):
        dsys = DescriptorPH.build(
            E=np.eye(2),
            J=np.zeros((2, 2)),
            R=np.diag([0.0, -1.0]),
            Q=np.diag([1.0, 0.0]),
            B=np.ones((2, 1)),
        )
        assert validate_descriptor(dsys).passed
        with pytest.raises(IndefiniteDissipation):
            descriptor_to_geometric(dsys)

    @pytest.mark.parametrize("complex_field", [False, True])
    def test_random_systems_give_geometric_triples(self, rng, complex_field):
        for _ in range(20):
            n, m = int(rng.integers(1, 5)), int(rng.integers(1, 4))
            gph, _ = descriptor_to_geometric(random_descriptor(rng, n, m, complex_field))
            assert validate_geometric(gph).passed

    def test_many_seeds_give_geometric_triples(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 4))
            dsys = random_descriptor(rng, n, m, bool(seed % 2), singular_q=bool(seed % 4 >= 2))
            gph, _ = descriptor_to_geometric(dsys)
            assert validate_geometric(gph).passed, seed

    def test_port_permutation(self):
        u = port_permutation(1, 1)
        assert np.array_equal(u @ np.arange(4.0), [0.0, 2.0, 3.0, 1.0])


class TestDescriptorSolutionMaps:
    def test_exact_solution_maps_to_members(self, scalar_desc):
        gph, maps = descriptor_to_geometric(scalar_desc)
        geo = desc_solution_to_geo(scalar_desc, maps, scalar_descriptor_solution(GRID))
        for values in membership_residuals(gph, geo).values():
            assert np.max(values) <= 1e-9

    def test_zero_solution_maps_to_zero(self, scalar_desc):
        _, maps = descriptor_to_geometric(scalar_desc)
        zero = Trajectory(
            grid=GRID, channels={Channel.Z: 0 * GRID, Channel.U: 0 * GRID, Channel.Y: 0 * GRID}
        )
        geo = desc_solution_to_geo(scalar_desc, maps, zero)
        for name in geo.names:
            assert np.all(geo.channel(name) == 0)

    def test_maps_invert_each_other(self, scalar_desc):
        _, maps = descriptor_to_geometric(scalar_desc)
        traj = scalar_descriptor_solution(GRID)
        geo = desc_solution_to_geo(scalar_desc, maps, traj)
        back = geo_solution_to_desc(scalar_desc, maps, geo)
        assert np.max(np.abs(back.channel(Channel.Z) - traj.channel(Channel.Z))) <= 1e-10

    def test_simulated_singular_Q_solution_maps_to_members(self):
        dsys = DescriptorPH.build(
            E=np.eye(2),
            J=np.array([[0.0, 1.0], [-1.0, 0.0]]),
            R=np.eye(2),
            Q=np.diag([1.0, 0.0]),
            B=np.array([[1.0], [0.0]]),
        )
        gph, maps = descriptor_to_geometric(dsys)
        cfg = SimConfig(t_end=1.0, h=0.01, input=InputSpec.parse("sin:1,2"))
        traj = integrate_implicit_euler(dsys, cfg, z0=[1.0, 0.5])
        geo = desc_solution_to_geo(dsys, maps, traj)
        limit = trajectory_tol(traj.h)
        for name, values in membership_residuals(gph, geo).items():
            assert np.max(values) <= limit, name
        assert verify_solution(gph, geo).passed

    def test_non_solution_rejected(self, scalar_desc):
        _, maps = descriptor_to_geometric(scalar_desc)
        traj = scalar_descriptor_solution(GRID)
        broken = traj.with_channels(**{Channel.Y: 2 * traj.channel(Channel.Y)})
        with pytest.raises(ResidualTooLarge, match="output"):
            desc_solution_to_geo(scalar_desc, maps, broken)

    def test_inconsistent_geometric_samples_rejected(self, scalar_desc):
        _, maps = descriptor_to_geometric(scalar_desc)
        traj = Trajectory(
            grid=GRID,
            channels={
                Channel.X: np.exp(-GRID),
                Channel.E_L: 2 * np.exp(-GRID),
                Channel.U: 0 * GRID,
                Channel.Y: np.exp(-GRID),
            },
        )
        with pytest.raises(NoConsistentZ):
            geo_solution_to_desc(scalar_desc, maps, traj)


# ---------------------------------------------------------------------------
# Pencils and transfer functions
# ---------------------------------------------------------------------------


class TestPencil:
    def test_regular_pencil(self):
        report = pencil_regular(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        assert report.regular
        assert report.method == "shift"

    def test_singular_pencil(self):
        report = pencil_regular(np.zeros((2, 2)), np.diag([1.0, 0.0]))
        assert not report.regular
        assert report.method == "qz"
        assert report.shifts_tested == 8

    def test_kernel_criterion_reported_for_dissipative_pencils(self):
        regular = pencil_regular(np.diag([1.0, 0.0]), -np.diag([0.0, 1.0]))
        singular = pencil_regular(np.diag([1.0, 0.0]), -np.diag([1.0, 0.0]))
        assert regular.regular and regular.kernel_test is True
        assert not singular.regular and singular.kernel_test is False

    def test_kernel_criterion_agrees_with_shift_test(self, rng):
        for trial in range(40):
            c = rng.standard_normal((4, 3))
            k = rng.standard_normal((4, 4))
            d = rng.standard_normal((4, 2))
            e, a = c @ c.T, (k - k.T) - d @ d.T
            if trial % 2:
                v = rng.standard_normal(4)
                proj = np.eye(4) - np.outer(v, v) / (v @ v)
                e, a = proj @ e @ proj, proj @ a @ proj
            report = pencil_regular(e, a)
            assert report.kernel_test is not None
            assert report.kernel_test == report.regular

    def test_kernel_criterion_agrees_on_many_seeds(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 6))
            c = rng.standard_normal((n, int(rng.integers(1, n + 1))))
            k = rng.standard_normal((n, n))
            d = rng.standard_normal((n, int(rng.integers(0, n + 1))))
            e, a = c @ c.T, (k - k.T) - d @ d.T
            if seed % 2:
                v = rng.standard_normal(n)
                proj = np.eye(n) - np.outer(v, v) / (v @ v)
                e, a = proj @ e @ proj, proj @ a @ proj
            report = pencil_regular(e, a)
            assert report.kernel_test == report.regular, seed

    def test_empty_pencil_is_regular(self):
        assert pencil_regular(np.zeros((0, 0)), np.zeros((0, 0))).regular

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            pencil_regular(np.eye(2), np.eye(3))


class TestTransferFunction:
    def test_first_order_lag(self, scalar_desc):
        assert np.allclose(transfer_function(scalar_desc, 1.0), [[0.5]])
        report = transfer_positive_real(scalar_desc, points=[1.0])
        assert report.min_eig == pytest.approx(1.0)
        assert report.passed

    def test_zero_input_matrix(self):
        dsys = DescriptorPH.build(
            E=np.eye(2), J=np.zeros((2, 2)), R=np.eye(2), Q=np.eye(2), B=np.zeros((2, 1))
        )
        report = transfer_positive_real(dsys, count=10)
        assert report.passed
        assert report.min_eig == pytest.approx(0.0)

    def test_converted_scalar_example_is_positive_real(self):
        dsys, _ = geometric_to_descriptor(scalar_geometric(r0=0.5))
        report = transfer_positive_real(dsys, count=100, seed=7)
        assert len(report.points) == 100
        assert report.passed

    def test_pencil_eigenvalue_rejected(self, scalar_desc):
        with pytest.raises(SingularShift):
            transfer_function(scalar_desc, -1.0)

    def test_left_half_plane_rejected(self, scalar_desc):
        with pytest.raises(InvalidParameter):
            transfer_positive_real(scalar_desc, points=[-0.5 + 1j])

    def test_singular_pencil_rejected(self):
        dsys = DescriptorPH.build(
            E=np.zeros((2, 2)), J=np.zeros((2, 2)), R=np.diag([1.0, 0.0]), Q=np.eye(2), B=np.ones((2, 1))
        )
        with pytest.raises(IrregularPencil):
            transfer_positive_real(dsys, count=5)


# ---------------------------------------------------------------------------
# Q = I roundtrip
# ---------------------------------------------------------------------------


class TestRoundtrip:
    def test_scalar_roundtrip_dimensions(self, scalar_desc):
        trip = compose_roundtrip(scalar_desc)
        assert trip.descriptor.n == 4
        assert trip.lift.dims()["k"] == 1
        assert np.array_equal(trip.descriptor.Q, np.eye(4))

    def test_random_systems_roundtrip_to_identity_Q(self, rng):
        for _ in range(10):
            dsys = random_descriptor(rng, int(rng.integers(1, 4)), int(rng.integers(1, 3)))
            out = roundtrip_q_identity(dsys)
            assert np.array_equal(out.Q, np.eye(out.n))
            assert validate_descriptor(out).passed

    def test_many_seeds_roundtrip_to_identity_Q(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n, m = int(rng.integers(2, 5)), int(rng.integers(1, 3))
            dsys = random_descriptor(rng, n, m, bool(seed % 2), singular_q=bool(seed % 4 >= 2))
            out = roundtrip_q_identity(dsys)
            assert np.array_equal(out.Q, np.eye(out.n)), seed
            assert validate_descriptor(out).passed, seed

    def test_kernel_overlap_propagates(self):
        dsys = DescriptorPH.build(
            E=np.zeros((1, 1)), J=np.zeros((1, 1)), R=np.eye(1), Q=np.zeros((1, 1)), B=np.ones((1, 1))
        )
        with pytest.raises(KernelOverlap):
            roundtrip_q_identity(dsys)

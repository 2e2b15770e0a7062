from __future__ import annotations

import numpy as np
import pytest

from phbridge.core.errors import MissingChannel, NotDescriptor, NotGeometric, ShapeError
from phbridge.core.kinds import Channel
from phbridge.relations.kernel import eig_extremes
from phbridge.relations.relation import graph, inverse_graph
from phbridge.systems.balance import (
    constraint_matrix,
    descriptor_defects,
    descriptor_power_residual,
    geometric_power_residual,
)
from phbridge.systems.descriptor import (
    DescriptorPH,
    compute_W,
    hamiltonian,
    hamiltonians,
    require_descriptor,
    validate_descriptor,
)
from phbridge.systems.geometric import (
    GeometricPH,
    membership_residuals,
    require_geometric,
    validate_geometric,
)
from phbridge.systems.trajectory import Trajectory
from tests.builders import (
    SCALAR_J_TILDE,
    random_descriptor,
    scalar_descriptor_solution,
    scalar_geometric,
    scalar_geometric_solution,
)

GRID = np.linspace(0.0, 1.0, 101)


# ---------------------------------------------------------------------------
# Descriptor systems
# ---------------------------------------------------------------------------


class TestDescriptorPH:
    def test_build_fills_zero_blocks(self, scalar_desc):
        assert scalar_desc.n == 1
        assert scalar_desc.m == 1
        assert np.array_equal(scalar_desc.P, np.zeros((1, 1)))
        assert np.array_equal(scalar_desc.N, np.zeros((1, 1)))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError, match="J"):
            DescriptorPH.build(
                E=np.eye(2), J=np.zeros((3, 3)), R=np.zeros((2, 2)), Q=np.eye(2), B=np.ones((2, 1))
            )

    def test_complex_block_promotes_every_matrix(self):
        dsys = DescriptorPH.build(
            E=np.eye(1), J=np.array([[1j]]), R=np.zeros((1, 1)), Q=np.eye(1), B=np.ones((1, 1))
        )
        assert dsys.is_complex
        assert all(np.iscomplexobj(m) for m in dsys.matrices().values())

    def test_matrices_are_read_only(self, scalar_desc):
        with pytest.raises(ValueError):
            scalar_desc.E[0, 0] = 2.0

    def test_derived_matrices(self, scalar_desc):
        assert np.allclose(scalar_desc.A, [[-1.0]])
        assert np.allclose(scalar_desc.input_matrix, [[1.0]])
        assert np.allclose(scalar_desc.output_matrix, [[1.0]])
        assert np.allclose(compute_W(scalar_desc), np.diag([1.0, 0.0]))

    @pytest.mark.parametrize("complex_field", [False, True])
    def test_random_systems_validate(self, rng, complex_field):
        for _ in range(20):
            dsys = random_descriptor(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)), complex_field)
            report = validate_descriptor(dsys)
            assert report.passed
            assert report.min_eig_W >= -1e-9

    def test_non_skew_J_fails(self):
        dsys = DescriptorPH.build(
            E=np.eye(2), J=np.eye(2), R=np.zeros((2, 2)), Q=np.eye(2), B=np.ones((2, 1))
        )
        report = validate_descriptor(dsys)
        assert not report.passed
        assert report.j_skew_residual > 0.5
        with pytest.raises(NotDescriptor):
            require_descriptor(dsys)

    def test_indefinite_dissipation_fails(self):
        dsys = DescriptorPH.build(
            E=np.eye(1), J=np.zeros((1, 1)), R=-np.eye(1), Q=np.eye(1), B=np.ones((1, 1))
        )
        assert validate_descriptor(dsys).min_eig_W < 0
        assert not validate_descriptor(dsys).passed

    def test_hamiltonian(self, scalar_desc):
        assert hamiltonian(scalar_desc, [2.0]) == pytest.approx(2.0)
        assert np.allclose(hamiltonians(scalar_desc, np.array([[1.0], [3.0]])), [0.5, 4.5])

    def test_hamiltonian_rejects_wrong_length(self, scalar_desc):
        with pytest.raises(ShapeError):
            hamiltonian(scalar_desc, [1.0, 2.0])


# ---------------------------------------------------------------------------
# Geometric systems
# ---------------------------------------------------------------------------


class TestGeometricPH:
    def test_scalar_example_validates(self, scalar_geo):
        report = validate_geometric(scalar_geo)
        assert report.passed
        assert report.dirac.is_dirac
        assert report.resistive.is_max_resistive

    def test_relation_sizes_checked(self):
        with pytest.raises(ShapeError, match="L"):
            GeometricPH(
                n=1, r=1, m=1,
                D=inverse_graph(SCALAR_J_TILDE),
                L=graph(np.eye(2)),
                R=inverse_graph(np.array([[-1.0]])),
            )

    def test_non_dirac_interconnection_rejected(self):
        gph = GeometricPH(
            n=1, r=1, m=1,
            D=graph(np.eye(3)),
            L=graph(np.eye(1)),
            R=inverse_graph(np.array([[-1.0]])),
        )
        with pytest.raises(NotGeometric, match="Dirac"):
            require_geometric(gph)

    def test_non_resistive_dissipation_rejected(self):
        with pytest.raises(NotGeometric, match="resistive"):
            require_geometric(scalar_geometric(r0=-1.0))

    def test_exact_solution_is_a_member(self, scalar_geo):
        residuals = membership_residuals(scalar_geo, scalar_geometric_solution(GRID))
        for values in residuals.values():
            assert np.max(values) <= 1e-12


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


class TestTrajectory:
    def test_channels_become_columns(self):
        traj = Trajectory(grid=GRID, channels={"u": np.zeros(GRID.size)})
        assert traj.channel("u").shape == (GRID.size, 1)
        assert traj.samples == GRID.size
        assert traj.h == pytest.approx(0.01)

    def test_non_uniform_grid_rejected(self):
        with pytest.raises(ShapeError, match="uniform"):
            Trajectory(grid=[0.0, 0.1, 0.3], channels={})

    def test_single_sample_rejected(self):
        with pytest.raises(ShapeError):
            Trajectory(grid=[0.0], channels={})

    def test_channel_length_checked(self):
        with pytest.raises(ShapeError):
            Trajectory(grid=GRID, channels={"u": np.zeros(3)})

    def test_missing_channel(self):
        traj = Trajectory(grid=GRID, channels={"u": np.zeros(GRID.size)})
        with pytest.raises(MissingChannel, match="x"):
            traj.channel(Channel.X)

    def test_derivative_is_exact_for_quadratics(self):
        traj = Trajectory(grid=GRID, channels={"x": GRID**2})
        assert np.allclose(traj.derivative("x")[:, 0], 2 * GRID)

    def test_with_channels_returns_a_new_trajectory(self):
        traj = Trajectory(grid=GRID, channels={"u": np.zeros(GRID.size)})
        extended = traj.with_channels(y=np.ones(GRID.size))
        assert extended.names == ["u", "y"]
        assert traj.names == ["u"]


# ---------------------------------------------------------------------------
# Power balance and defects
# ---------------------------------------------------------------------------


class TestBalance:
    def test_geometric_balance_on_exact_solution(self, scalar_geo):
        summary = geometric_power_residual(scalar_geo, scalar_geometric_solution(GRID))
        assert summary.max_residual <= 1e-12
        assert summary.max_dissipation <= 0
        assert summary.max_supply_excess <= 1e-12

    def test_descriptor_balance_on_exact_solution(self, scalar_desc):
        summary = descriptor_power_residual(scalar_desc, scalar_descriptor_solution(GRID))
        assert len(summary.residuals) == GRID.size - 1
        assert summary.max_residual <= 1e-3

    def test_descriptor_defects_on_exact_solution(self, scalar_desc):
        defects = descriptor_defects(scalar_desc, scalar_descriptor_solution(GRID))
        assert np.max(defects["algebraic"]) == 0.0
        assert np.max(defects["output"]) <= 1e-14
        assert np.max(defects["derivative"]) <= 1e-3

    def test_constraint_rows_of_singular_E(self):
        dsys = DescriptorPH.build(
            E=np.diag([1.0, 0.0]),
            J=np.array([[0.0, -1.0], [1.0, 0.0]]),
            R=np.diag([0.0, 2.0]),
            Q=np.eye(2),
            B=np.array([[-1.0], [0.0]]),
        )
        rows, inputs = constraint_matrix(dsys)
        assert rows.shape == (1, 2)
        assert np.allclose(np.abs(rows), [[1.0, 2.0]])
        assert np.allclose(inputs, 0)

    def test_lossless_system_has_no_dissipation(self, lossless):
        lo, hi = eig_extremes(compute_W(lossless))
        assert lo == pytest.approx(0.0) and hi == pytest.approx(0.0)

    def test_dissipation_term_already_carries_Q(self):
        one = np.array([[1.0]])
        dsys = DescriptorPH.build(E=one, J=np.zeros((1, 1)), R=one, Q=2 * one, B=np.zeros((1, 1)))
        steady = Trajectory(
            grid=GRID,
            channels={Channel.Z: np.ones_like(GRID), Channel.U: 0 * GRID, Channel.Y: 0 * GRID},
        )
        # ‖R^½ Q z‖² = 4 while H stays constant.
        assert descriptor_power_residual(dsys, steady).residuals == pytest.approx([4.0] * 100)

    def test_lossless_exact_solution_balances(self, lossless):
        traj = Trajectory(
            grid=GRID,
            channels={
                Channel.Z: np.column_stack([np.cos(GRID), -np.sin(GRID)]),
                Channel.U: 0 * GRID,
                Channel.Y: 0 * GRID,
            },
        )
        assert descriptor_power_residual(lossless, traj).max_residual <= 1e-12

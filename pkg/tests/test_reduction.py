import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from goldfishlab import dynamics, reduction
from goldfishlab.errors import (
    DegenerateRay,
    EigenvalueCollision,
    NonPositiveMomentum,
    NonPositiveVelocity,
)

from conftest import states

TIGHT = dynamics.IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12)


class TestMatrixFlow:
    def test_free_flow_is_affine(self):
        flow = reduction.MatrixFlow(np.diag([0.0, 1.0]), np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert_allclose(reduction.free_flow(flow, 1.0), [[1.0, 2.0], [2.0, 5.0]])
        assert_allclose(reduction.free_flow(flow, 0.0), flow.x0)

    def test_requires_exact_symmetry(self):
        with pytest.raises(ValueError):
            reduction.MatrixFlow(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2)))


class TestEigenTrack:
    def test_constant_flow(self):
        flow = reduction.MatrixFlow(np.diag([0.0, 1.0]), np.zeros((2, 2)))
        ft, eigs = reduction.eigen_track(flow, np.linspace(0, 1, 5))
        assert_allclose(ft.frames, np.broadcast_to(np.eye(2), (5, 2, 2)))
        assert_allclose(eigs, np.broadcast_to([0.0, 1.0], (5, 2)))

    def test_rank_one_eigenvalues(self):
        flow = reduction.MatrixFlow(np.diag([0.0, 1.0]), np.array([[1.0, 2.0], [2.0, 4.0]]))
        _, eigs = reduction.eigen_track(flow, np.array([0.0, 1.0]))
        assert_allclose(eigs[-1], [3.0 - 2.0 * np.sqrt(2.0), 3.0 + 2.0 * np.sqrt(2.0)])

    def test_frames_converge_with_grid(self):
        flow = reduction.rank1_velocity([0.0, 1.0, 2.0], [1.0, 0.7, 1.2])
        coarse, _ = reduction.eigen_track(flow, np.linspace(0, 0.3, 4))
        fine, _ = reduction.eigen_track(flow, np.linspace(0, 0.3, 301))
        step_coarse = max(
            np.abs(coarse.frames[k + 1] - coarse.frames[k]).max() for k in range(3)
        )
        step_fine = max(
            np.abs(fine.frames[k + 1] - fine.frames[k]).max() for k in range(300)
        )
        assert step_fine < step_coarse / 10

    def test_crossing_eigenvalues_raise(self):
        flow = reduction.MatrixFlow(np.diag([0.0, 1.0]), np.diag([1.0, -1.0]))
        with pytest.raises(EigenvalueCollision):
            reduction.eigen_track(flow, np.linspace(0.0, 1.0, 11))


class TestRankOneVelocity:
    def test_outer_product(self):
        flow = reduction.rank1_velocity([0.0, 1.0], [1.0, 4.0])
        assert_allclose(flow.v0, [[1.0, 2.0], [2.0, 4.0]])
        assert_allclose(np.linalg.eigvalsh(flow.v0), [0.0, 5.0], atol=1e-12)

    def test_eigenvalues_follow_exact_solution(self):
        flow = reduction.rank1_velocity([0.0, 1.0], [1.0, 4.0])
        state = dynamics.GoldfishState([0.0, 1.0], [1.0, 4.0])
        for t in (0.1, 0.5, 1.0):
            eigs = np.linalg.eigvalsh(reduction.free_flow(flow, t))
            assert_allclose(np.sort(eigs), dynamics.goldfish_exact(state, t), atol=1e-11)

    def test_rejects_nonpositive_velocity(self):
        with pytest.raises(NonPositiveVelocity):
            reduction.rank1_velocity([0.0, 1.0], [1.0, 0.0])


class TestCanonicalTransform:
    def test_hand_values(self):
        chart = reduction.canonical_transform([1.0, 2.0], [4.0, 1.0])
        assert_allclose(chart.P, [2.0, 1.0])
        assert_allclose(chart.Q, [4.0, 4.0])

    def test_angular_momentum_identity(self):
        chart = reduction.canonical_transform([0.0, 1.0], [1.0, 4.0])
        assert reduction.angular_momentum(chart)[0, 1] == -4.0

    @settings(max_examples=30, deadline=None)
    @given(states(max_n=5))
    def test_roundtrip(self, state):
        q, p = state
        chart = reduction.canonical_transform(q, p)
        q2, p2 = reduction.canonical_transform_inverse(chart)
        assert np.abs(q2 - q).max() < 1e-12
        assert np.abs(p2 - p).max() < 1e-12

    def test_rejects_nonpositive_momentum(self):
        with pytest.raises(NonPositiveMomentum):
            reduction.canonical_transform([0.0, 1.0], [1.0, -2.0])


class TestMMatrix:
    def test_hand_values(self):
        assert reduction.m_matrix([0.0, 1.0], [1.0, 4.0])[0, 1] == 2.0
        assert reduction.m_matrix([0.0, 1.0], [1.0, 1.0])[0, 1] == 1.0

    def test_antisymmetric(self):
        m = reduction.m_matrix([-0.4, 0.7, 1.9], [0.9, 1.2, 0.6])
        assert np.abs(m + m.T).max() < 1e-14


class TestQPMotion:
    def test_pushforward_of_goldfish_flow(self):
        # oracle: transform qdot = p, pdot = goldfish acceleration at
        # q = (0, 1), p = (1, 4) through Q = 2 q sqrt(p), P = sqrt(p)
        chart = reduction.ReducedChart(Q=np.array([0.0, 4.0]), P=np.array([1.0, 2.0]))
        qdot, pdot = reduction.qp_rhs(chart)
        assert_allclose(qdot, [2.0, 20.0])
        assert_allclose(pdot, [-4.0, 2.0])

    def test_invariant_combination(self):
        chart = reduction.ReducedChart(Q=np.array([0.0, 4.0]), P=np.array([1.0, 2.0]))
        qdot, pdot = reduction.qp_rhs(chart)
        assert_allclose(qdot * chart.P - chart.Q * pdot, 2.0 * chart.P**4)

    def test_single_particle(self):
        chart = reduction.ReducedChart(Q=np.array([3.0]), P=np.array([2.0]))
        qdot, pdot = reduction.qp_rhs(chart)
        assert_allclose(qdot, [16.0])
        assert_allclose(pdot, [0.0])

    def test_degenerate_ray(self):
        chart = reduction.ReducedChart(Q=np.array([1.0, 2.0]), P=np.array([1.0, 2.0]))
        with pytest.raises(DegenerateRay):
            reduction.qp_rhs(chart)

    @settings(max_examples=30, deadline=None)
    @given(states(max_n=5))
    def test_identity_at_random_charts(self, state):
        q, p = state
        chart = reduction.canonical_transform(q, p)
        qdot, pdot = reduction.qp_rhs(chart)
        lhs = qdot * chart.P - chart.Q * pdot
        assert np.abs(lhs - 2.0 * chart.P**4).max() < 1e-10


class TestFrameFlow:
    def test_single_particle_frame_is_identity(self):
        ft = reduction.frame_flow([0.5], [2.0], np.linspace(0, 1, 5), TIGHT)
        assert_allclose(ft.frames, np.ones((5, 1, 1)))

    def test_orthogonality_preserved(self):
        grid = np.linspace(0.0, 0.3, 31)
        ft = reduction.frame_flow([0.0, 1.0, 2.1], [1.0, 0.7, 1.3], grid, TIGHT)
        for r in ft.frames:
            assert np.abs(r.T @ r - np.eye(3)).max() < 1e-8

    def test_matches_eigen_frame_up_to_column_signs(self):
        grid = np.linspace(0.0, 0.3, 31)
        ft = reduction.frame_flow([0.0, 1.0], [1.0, 4.0], grid, TIGHT)
        et, _ = reduction.eigen_track(reduction.rank1_velocity([0.0, 1.0], [1.0, 4.0]), grid)
        for a, b in zip(ft.frames, et.frames):
            signs = np.sign(np.sum(a * b, axis=0))
            signs[signs == 0] = 1.0
            assert np.abs(a - b * signs).max() < 1e-6

    def test_requires_positive_velocities(self):
        with pytest.raises(NonPositiveVelocity):
            reduction.frame_flow([0.0, 1.0], [1.0, -1.0], np.linspace(0, 0.1, 3))


class TestInvariantVectors:
    def test_initial_values(self):
        grid = np.linspace(0.0, 0.3, 16)
        ft = reduction.frame_flow([0.0, 1.0], [1.0, 4.0], grid, TIGHT)
        u, v = reduction.invariant_vectors(ft)
        assert_allclose(v[0], [1.0, 2.0])
        assert_allclose(u[0], [0.0, 4.0])
        assert_allclose(reduction.free_vector_hamiltonian(u[0], v[0]), 12.5)

    def test_free_vector_motion(self):
        grid = np.linspace(0.0, 0.3, 31)
        ft = reduction.frame_flow([0.0, 1.0, 2.2], [1.0, 0.8, 1.1], grid, TIGHT)
        u, v = reduction.invariant_vectors(ft)
        assert np.abs(v - v[0]).max() < 1e-7
        vv = float(v[0] @ v[0])
        linear = u[0][None, :] + 2.0 * grid[:, None] * v[0][None, :] * vv
        assert np.abs(u - linear).max() < 1e-7

    def test_requires_chart_curves(self):
        ft, _ = reduction.eigen_track(
            reduction.rank1_velocity([0.0, 1.0], [1.0, 1.0]), np.linspace(0, 0.1, 3)
        )
        with pytest.raises(ValueError):
            reduction.invariant_vectors(ft)


class TestFrameConsistency:
    def test_initial_velocity_reconstruction(self):
        # Xdot(0) = R (Ddot + [M, D]) R^{-1} with R(0) = I must rebuild V0
        q0 = np.array([0.0, 1.0, 2.3])
        qdot0 = np.array([1.0, 0.7, 1.3])
        flow = reduction.rank1_velocity(q0, qdot0)
        m = reduction.m_matrix(q0, qdot0)
        d = np.diag(q0)
        xdot0 = np.diag(qdot0) + m @ d - d @ m
        assert np.abs(xdot0 - flow.v0).max() < 1e-10

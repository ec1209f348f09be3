import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from goldfishlab import dynamics, geometry, symfun

from conftest import configurations


class TestChristoffel:
    def test_two_particles(self):
        gam = geometry.christoffel([0.0, 1.0])
        assert gam[0, 0, 1] == 1.0
        assert gam[0, 1, 0] == 1.0
        assert gam[1, 0, 1] == -1.0
        assert gam[1, 1, 0] == -1.0
        assert gam[0, 0, 0] == 0.0 and gam[1, 1, 1] == 0.0

    def test_single_particle_vanishes(self):
        assert np.all(geometry.christoffel([5.0]) == 0.0)

    def test_three_particle_entry(self):
        gam = geometry.christoffel([0.0, 1.0, 3.0])
        assert_allclose(gam[0, 0, 2], 1.0 / 3.0)

    @settings(max_examples=30, deadline=None)
    @given(configurations(min_n=1))
    def test_symmetry_and_sparsity(self, q):
        gam = geometry.christoffel(q)
        assert np.array_equal(gam, gam.transpose(0, 2, 1))
        n = len(q)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if i != j and i != k:
                        assert gam[i, j, k] == 0.0

    def test_matches_general_connection_for_flat_w(self):
        q = np.array([-0.7, 0.4, 1.8])
        assert_allclose(
            geometry.christoffel(q), geometry.connection_symbols(q, geometry.W_FLAT)
        )


class TestCurvature:
    def test_flat_for_rational_w(self):
        q = np.array([0.0, 1.0, 3.0])
        assert np.abs(geometry.curvature(q)).max() < 1e-12

    def test_nonflat_control(self):
        w = geometry.WFunction.scaled_rational(1.0)
        assert np.abs(geometry.curvature(np.array([0.0, 1.0, 3.0]), w)).max() > 0.1

    def test_two_particles_flat_only_for_coefficient_two(self):
        # per pair the only surviving component is -w'_12 + w_12^2, which
        # vanishes exactly for w = 2/x; c = 1 leaves (c/2 - c^2/4)/gap^2
        q = np.array([0.0, 1.0])
        assert np.abs(geometry.curvature(q)).max() < 1e-15
        w1 = geometry.WFunction.scaled_rational(1.0)
        assert_allclose(np.abs(geometry.curvature(q, w1)).max(), 0.25)

    @settings(max_examples=15, deadline=None)
    @given(configurations(max_n=5))
    def test_closed_form_matches_connection_assembly(self, q):
        w = geometry.WFunction.scaled_rational(1.0)
        diff = geometry.curvature(q, w) - geometry.curvature_finite_difference(q, w)
        assert np.abs(diff).max() < 1e-6

    def test_custom_w_uses_numeric_derivative(self):
        analytic = geometry.WFunction.scaled_rational(1.5)
        numeric = geometry.WFunction(func=lambda x: 1.5 / x, label="1.5/x")
        q = np.array([-0.5, 0.6, 1.4])
        assert_allclose(
            geometry.curvature(q, numeric), geometry.curvature(q, analytic), atol=1e-7
        )

    def test_even_w_rejected(self):
        even = geometry.WFunction(func=lambda x: x**2)
        with pytest.raises(ValueError, match="odd"):
            geometry.curvature(np.array([0.0, 1.0]), even)


class TestMetric:
    def test_hand_values(self):
        assert_allclose(geometry.metric([1.0, 2.0]), [[5.0, 3.0], [3.0, 2.0]])
        assert_allclose(geometry.metric([4.0]), [[1.0]])

    # the LU determinant of g carries a relative error ~ eps * cond(g), so
    # the searched domain stays where cond(g) <= 1e6
    @settings(max_examples=30, deadline=None)
    @given(configurations(min_n=1, min_gap=0.3, max_gap=0.6, bound=1.2))
    def test_determinant_is_squared_vandermonde(self, q):
        det = np.linalg.det(geometry.metric(q))
        vandermonde = symfun.jacobian_det(q)
        assert abs(det - vandermonde**2) <= 1e-9 * max(1.0, vandermonde**2)

    def test_inverse_metric_hand_values(self):
        assert_allclose(geometry.inverse_metric([1.0, 2.0]), [[2.0, -3.0], [-3.0, 5.0]])
        assert_allclose(geometry.inverse_metric([5.0]), [[1.0]])

    @settings(max_examples=30, deadline=None)
    @given(configurations(min_n=1, min_gap=0.3, max_gap=0.6, bound=1.2))
    def test_inverse_metric_inverts(self, q):
        prod = geometry.metric(q) @ geometry.inverse_metric(q)
        assert np.abs(prod - np.eye(len(q))).max() < 1e-10


class TestGeodesicFlow:
    def test_hamiltonian_hand_value(self):
        state = geometry.GeodesicState([1.0, 2.0], [8.0, 5.0])
        assert_allclose(geometry.geodesic_hamiltonian(state), 6.5)

    def test_hamiltonian_zero_momentum(self):
        state = geometry.GeodesicState([0.2, 1.4, 2.0], np.zeros(3))
        assert geometry.geodesic_hamiltonian(state) == 0.0

    def test_hamiltonian_single_particle(self):
        state = geometry.GeodesicState([0.0], [3.0])
        assert_allclose(geometry.geodesic_hamiltonian(state), 4.5)

    def test_rhs_hand_value(self):
        state = geometry.GeodesicState([1.0, 2.0], [8.0, 5.0])
        qdot, _ = geometry.geodesic_rhs(state)
        assert_allclose(qdot, [1.0, 1.0], atol=1e-13)

    def test_rhs_single_particle(self):
        state = geometry.GeodesicState([0.3], [2.0])
        qdot, pidot = geometry.geodesic_rhs(state)
        assert_allclose(qdot, [2.0])
        assert_allclose(pidot, [0.0])

    def test_gradient_analytic_vs_finite_difference(self):
        q = np.array([-1.2, -0.1, 0.8, 1.7])
        assert_allclose(
            geometry.inverse_metric_gradient(q),
            geometry.inverse_metric_gradient_fd(q),
            atol=1e-7,
        )

    def test_acceleration_matches_goldfish(self):
        q = np.array([-0.9, 0.2, 1.4])
        pi = np.array([0.7, 1.1, 0.6])
        state = geometry.GeodesicState(q, pi)
        qdot, pidot = geometry.geodesic_rhs(state)
        dg = geometry.inverse_metric_gradient(q)
        acc = np.einsum("kij,k,j->i", dg, qdot, pi) + geometry.inverse_metric(q) @ pidot
        assert_allclose(acc, dynamics.goldfish_rhs(dynamics.GoldfishState(q, qdot)), atol=1e-10)

    def test_energy_conserved_along_flow(self):
        q = np.array([-0.5, 0.5, 1.5])
        state = geometry.GeodesicState(q, geometry.metric(q) @ np.array([1.0, 0.8, 1.2]))
        config = dynamics.IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12)
        traj = dynamics.integrate("geodesic", state, 0.3, config, output_points=11)
        assert traj.diagnostics["energy_drift"].max() < 1e-9

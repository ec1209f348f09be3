import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from goldfishlab import symfun
from goldfishlab.errors import ComplexRoots, RootCollision

from conftest import configurations


def brute_force_elementary(q, n):
    """Tuple-sum definition: sum of products over index subsets of size n."""
    return sum(math.prod(combo) for combo in itertools.combinations(q, n))


class TestElemSymCoords:
    def test_hand_values(self):
        assert_allclose(symfun.elem_sym_coords([1.0, 2.0]), [3.0, 2.0])
        assert_allclose(symfun.elem_sym_coords([1.0, 2.0, 3.0]), [6.0, 11.0, 6.0])
        assert_allclose(symfun.elem_sym_coords([-1.0, 0.0, 1.0]), [0.0, -1.0, 0.0])

    @pytest.mark.parametrize("q", [[0.3, 1.1], [-1.0, 0.2, 0.9], [-2.0, -0.5, 0.25, 1.5]])
    def test_matches_tuple_sum(self, q):
        x = symfun.elem_sym_coords(q)
        expected = [brute_force_elementary(q, n) for n in range(1, len(q) + 1)]
        assert_allclose(x, expected, rtol=1e-13, atol=1e-14)

    def test_rejects_unordered_and_close(self):
        with pytest.raises(ValueError):
            symfun.as_configuration([1.0, 0.5])
        with pytest.raises(ValueError):
            symfun.as_configuration([0.0, 1e-12])
        with pytest.raises(ValueError):
            symfun.as_configuration([0.0, np.inf])


class TestJacobian:
    def test_hand_values(self):
        assert_allclose(symfun.jacobian([1.0, 2.0]), [[1.0, 1.0], [2.0, 1.0]])
        assert_allclose(
            symfun.jacobian([1.0, 2.0, 3.0]),
            [[1.0, 1.0, 1.0], [5.0, 4.0, 3.0], [6.0, 3.0, 2.0]],
        )
        assert_allclose(symfun.jacobian([7.0]), [[1.0]])

    @settings(max_examples=40, deadline=None)
    @given(configurations(min_n=1))
    def test_columns_match_finite_differences(self, q):
        h = 1e-5
        jac = symfun.jacobian(q)
        for j in range(len(q)):
            qp = q.copy()
            qm = q.copy()
            qp[j] += h
            qm[j] -= h
            col = (symfun.elem_sym_coords(qp) - symfun.elem_sym_coords(qm)) / (2 * h)
            assert np.abs(col - jac[:, j]).max() < 1e-7 * max(1.0, np.abs(jac).max())


class TestJacobianDet:
    def test_hand_values(self):
        assert symfun.jacobian_det([1.0, 2.0]) == -1.0
        assert symfun.jacobian_det([1.0, 2.0, 3.0]) == -2.0
        # six negative factors: the pair product is +48
        assert symfun.jacobian_det([0.0, 1.0, 2.0, 4.0]) == 48.0

    @settings(max_examples=40, deadline=None)
    @given(configurations(min_n=1))
    def test_matches_lu_determinant(self, q):
        closed = symfun.jacobian_det(q)
        lu = np.linalg.det(symfun.jacobian(q))
        assert abs(closed - lu) <= 1e-9 * max(1.0, abs(closed))


class TestJacobianInverse:
    def test_hand_values(self):
        assert_allclose(symfun.jacobian_inverse([1.0, 2.0]), [[-1.0, 1.0], [2.0, -1.0]])
        assert_allclose(symfun.jacobian_inverse([1.0, 2.0, 3.0])[0], [0.5, -0.5, 0.5])

    def test_against_numerical_inverse(self):
        q = np.array([0.3, 1.1, 1.9, 2.6])
        assert_allclose(
            symfun.jacobian_inverse(q), np.linalg.inv(symfun.jacobian(q)), atol=1e-11
        )

    @settings(max_examples=40, deadline=None)
    @given(configurations(min_n=1))
    def test_product_is_identity(self, q):
        prod = symfun.jacobian(q) @ symfun.jacobian_inverse(q)
        assert np.abs(prod - np.eye(len(q))).max() < 1e-10


class TestRootsFromCoords:
    def test_hand_values(self):
        assert_allclose(symfun.roots_from_coords([3.0, 2.0]), [1.0, 2.0])
        assert_allclose(symfun.roots_from_coords([0.0, -1.0]), [-1.0, 1.0])
        # roots of x^2 - 3x + 1 are (3 -+ sqrt(5))/2
        assert_allclose(
            symfun.roots_from_coords([3.0, 1.0]),
            [0.3819660112501051, 2.618033988749895],
            rtol=1e-12,
        )
        assert_allclose(symfun.roots_from_coords([4.0]), [4.0])

    def test_complex_roots_raise(self):
        with pytest.raises(ComplexRoots):
            symfun.roots_from_coords([0.0, 1.0])  # x^2 + 1

    def test_root_collision_raises(self):
        with pytest.raises(RootCollision):
            symfun.roots_from_coords([2.0, 1.0])  # (x - 1)^2

    # root recovery loses ~cond digits for tightly clustered roots, so the
    # searched domain keeps the gaps wide; the verification suite covers the
    # standard sampling recipe separately
    @settings(max_examples=50, deadline=None)
    @given(configurations(min_n=1, max_n=8, min_gap=0.5, max_gap=0.8))
    def test_roundtrip(self, q):
        back = symfun.roots_from_coords(symfun.elem_sym_coords(q))
        assert np.abs(back - q).max() <= 1e-10 * max(1.0, np.abs(q).max())

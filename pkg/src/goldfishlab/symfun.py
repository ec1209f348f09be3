"""Elementary-symmetric-function coordinates and polynomial root recovery.

The map q -> x built from the elementary symmetric polynomials straightens the
goldfish flow into free motion.  This module holds the coordinate map, its
Jacobian and inverse Jacobian in closed form, the Vandermonde determinant, and
the inverse map obtained as companion-matrix roots.

All position vectors are "configurations": strictly increasing, pairwise
separated by more than a collision tolerance.  Solver outputs are always
sorted ascending so results are comparable across solvers.
"""
from __future__ import annotations

import numpy as np

from .errors import ComplexRoots, RootCollision
from .utils import finite_vector, pairwise_differences

#: Default absolute gap below which two positions count as collided.
COLLISION_TOL = 1e-8


def as_configuration(q, min_gap: float = COLLISION_TOL) -> np.ndarray:
    """Validate q as an ordered configuration and return it as a float array.

    Requires N >= 1, strictly increasing entries and a minimal adjacent gap
    above ``min_gap``.
    """
    q = finite_vector(q, name="q")
    if q.size < 1:
        raise ValueError("configuration needs at least one particle")
    if q.size > 1:
        gaps = np.diff(q)
        if np.any(gaps <= 0):
            raise ValueError("positions must be strictly increasing")
        if gaps.min() <= min_gap:
            raise ValueError(
                f"minimal gap {gaps.min():.3e} at or below collision tolerance {min_gap:.3e}"
            )
    return q


def _elementary_all(values: np.ndarray) -> np.ndarray:
    """All elementary symmetric polynomials e_0..e_m of ``values`` (m = len).

    One-pass stable recurrence, O(m^2); e_0 = 1.
    """
    m = values.size
    e = np.zeros(m + 1)
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + v * e[:-1]
    return e


def elem_sym_coords(q) -> np.ndarray:
    """Flat coordinates x_n = e_n(q), n = 1..N."""
    q = as_configuration(q)
    return _elementary_all(q)[1:]


def jacobian(q) -> np.ndarray:
    """J[n, j] = d x_n / d q_j = e_{n-1} of q with entry j removed."""
    q = as_configuration(q)
    n = q.size
    jac = np.empty((n, n))
    for j in range(n):
        jac[:, j] = _elementary_all(np.delete(q, j))[:n]
    return jac


def jacobian_det(q) -> float:
    """det J = prod_{i<j} (q_i - q_j), evaluated from the product formula."""
    q = as_configuration(q)
    diffs = pairwise_differences(q)
    return float(np.prod(diffs[np.triu_indices(q.size, 1)]))


def jacobian_inverse(q) -> np.ndarray:
    """Closed-form inverse: (J^-1)[i, m] = (-1)^(m-1) q_i^(N-m) / prod_{j!=i}(q_i - q_j)."""
    q = as_configuration(q)
    n = q.size
    diffs = pairwise_differences(q) + np.eye(n)  # self-factor neutralized
    denom = np.prod(diffs, axis=1)
    powers = q[:, None] ** np.arange(n - 1, -1, -1)[None, :]
    signs = (-1.0) ** np.arange(n)
    return signs[None, :] * powers / denom[:, None]


def roots_from_coords(x, tol: float = 1e-9, min_gap: float = COLLISION_TOL) -> np.ndarray:
    """Recover positions as the roots of the monic polynomial with Vieta data x.

    The polynomial is lambda^N - x_1 lambda^(N-1) + ... + (-1)^N x_N; roots are
    computed as companion-matrix eigenvalues and returned sorted ascending.

    Raises ComplexRoots when any |Im root| >= tol, RootCollision when two real
    roots are closer than ``min_gap``.
    """
    x = finite_vector(x, name="x")
    n = x.size
    coeffs = np.concatenate(([1.0], ((-1.0) ** np.arange(1, n + 1)) * x))
    roots = np.roots(coeffs)
    worst_imag = float(np.abs(roots.imag).max()) if n else 0.0
    if worst_imag >= tol:
        raise ComplexRoots(f"imaginary part {worst_imag:.3e} >= tol {tol:.3e}")
    real = np.sort(roots.real)
    if n > 1 and np.diff(real).min() < min_gap:
        raise RootCollision(
            f"root gap {np.diff(real).min():.3e} below collision tolerance {min_gap:.3e}"
        )
    return real

"""Hyperbolic variant: sinh interactions, Lax pair, and exact solutions.

The deformed flow lives on positive matrices.  Its eigenvalue dynamics is the
sinh-coupled second-order system which degenerates to the rational goldfish
flow as the deformation parameter a -> 0.  Two exact routes for the coth
equation are provided: eigenvalues of Z(t) = e^{2 Lambda0} e^{2 t L0}, and the
linear evolution of the symmetric functions of e^{2 q_i}, plus the one-line
root characterization f(q) = 0 used as a residual cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import dynamics, symfun
from .errors import (
    NonPositiveEigenvalue,
    NonPositiveRoot,
    NonPositiveVelocity,
    NonRealSpectrum,
    PoleProximity,
)
from .utils import finite_vector, pairwise_differences


@dataclass(frozen=True)
class HyperbolicState:
    """Positions lam with velocities lamdot."""

    lam: np.ndarray
    lamdot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", symfun.as_configuration(self.lam))
        object.__setattr__(self, "lamdot", finite_vector(self.lamdot, self.lam.size, "lamdot"))

    @property
    def n(self) -> int:
        return self.lam.size


@dataclass(frozen=True)
class HyperbolicData:
    """Deformation parameter a with initial positions a_vec and velocities c_vec."""

    a: float
    a_vec: np.ndarray
    c_vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a_vec", symfun.as_configuration(self.a_vec))
        object.__setattr__(self, "c_vec", finite_vector(self.c_vec, self.a_vec.size, "c_vec"))

    @property
    def n(self) -> int:
        return self.a_vec.size

    @property
    def momentum(self) -> float:
        """P = sum c_i, the conserved total velocity."""
        return float(np.sum(self.c_vec))


def hyperbolic_rhs(state: HyperbolicState, a: float) -> np.ndarray:
    """lamddot_i = 2 sum_{j != i} 2 a lamdot_i lamdot_j / sinh(2 a (lam_i - lam_j))."""
    if a == 0:
        raise ValueError("a must be nonzero; the a -> 0 limit is the rational flow")
    n = state.n
    gaps = pairwise_differences(state.lam)
    off = ~np.eye(n, dtype=bool)
    kernel = np.zeros((n, n))
    kernel[off] = 2.0 * a / np.sinh(2.0 * a * gaps[off])
    return 2.0 * state.lamdot * (kernel @ state.lamdot)


def coth_rhs(state: HyperbolicState) -> np.ndarray:
    """qddot_i = 2 sum_{j != i} qdot_i qdot_j coth(q_i - q_j)."""
    n = state.n
    gaps = pairwise_differences(state.lam)
    off = ~np.eye(n, dtype=bool)
    kernel = np.zeros((n, n))
    kernel[off] = 1.0 / np.tanh(gaps[off])
    return 2.0 * state.lamdot * (kernel @ state.lamdot)


def lax_pair(state: HyperbolicState, a: float) -> tuple[np.ndarray, np.ndarray]:
    """Lax matrices (L, M) of the sinh flow with the square-root substitution.

    M_ij = -2a sqrt(lamdot_i lamdot_j) / sinh(2a (lam_i - lam_j)) off the
    diagonal; L_ij = delta_ij lamdot_i - sinh(2a (lam_i - lam_j))/(2a) M_ij,
    which collapses to the rank-one form sqrt(lamdot_i lamdot_j).  Along the
    flow Ldot = [L, M], so the spectrum of L is conserved.
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    if np.any(state.lamdot <= 0):
        raise NonPositiveVelocity("lax substitution needs lamdot_i > 0")
    n = state.n
    gaps = pairwise_differences(state.lam)
    off = ~np.eye(n, dtype=bool)
    m = np.zeros((n, n))
    m[off] = -2.0 * a * np.sqrt(np.outer(state.lamdot, state.lamdot))[off] / np.sinh(2.0 * a * gaps[off])
    sinh_fac = np.zeros((n, n))
    sinh_fac[off] = np.sinh(2.0 * a * gaps[off]) / (2.0 * a)
    lax = np.diag(state.lamdot) - sinh_fac * m
    return lax, m


def initial_velocity_matrix(data: HyperbolicData) -> np.ndarray:
    """(V0)_ij = a sqrt(c_i c_j) / cosh(a (a_i - a_j)); needs c_i > 0."""
    if np.any(data.c_vec <= 0):
        raise NonPositiveVelocity("V0 needs c_i > 0")
    gaps = pairwise_differences(data.a_vec)
    return data.a * np.sqrt(np.outer(data.c_vec, data.c_vec)) / np.cosh(data.a * gaps)


def _symmetric_expm(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """e^S for symmetric S via eigendecomposition; returns (e^S, eigensystem)."""
    vals, vecs = np.linalg.eigh(s)
    return (vecs * np.exp(vals)) @ vecs.T, (vals, vecs)


def matrix_geodesic(data: HyperbolicData, t: float) -> np.ndarray:
    """X(t) = e^{a Lambda0} e^{2 t V0} e^{a Lambda0} on positive matrices."""
    v0 = initial_velocity_matrix(data)
    left = np.exp(data.a * data.a_vec)
    middle, _ = _symmetric_expm(2.0 * t * v0)
    return left[:, None] * middle * left[None, :]


def conserved_combination(data: HyperbolicData, t: float) -> np.ndarray:
    """K(t) = Xdot X^{-1} + X^{-1} Xdot, constant along the matrix geodesic.

    Dividing by 4a gives the matrix conjugate to the Lax matrix of the
    eigenvalue flow.
    """
    v0 = initial_velocity_matrix(data)
    vals, vecs = np.linalg.eigh(2.0 * t * v0)
    middle = (vecs * np.exp(vals)) @ vecs.T
    middle_inv = (vecs * np.exp(-vals)) @ vecs.T
    dmiddle = 2.0 * v0 @ middle  # V0 commutes with its own exponential
    left = np.exp(data.a * data.a_vec)
    x = left[:, None] * middle * left[None, :]
    xdot = left[:, None] * dmiddle * left[None, :]
    xinv = (1.0 / left)[:, None] * middle_inv * (1.0 / left)[None, :]
    return xdot @ xinv + xinv @ xdot


def z_eigen_solution(data: HyperbolicData, t: float, imag_tol: float = 1e-9) -> np.ndarray:
    """Positions from the eigenvalues of Z(t) = e^{2 Lambda0} e^{2 t L0}.

    (L0)_ij = c_j row-replicated; mixed-sign velocities are allowed here, only
    reality and positivity of the spectrum are enforced: q_i = ln(mu_i) / 2
    with mu ascending.
    """
    if data.momentum == 0:
        raise ValueError("z route needs P = sum c_i != 0")
    n = data.n
    l0 = np.tile(data.c_vec, (n, 1))
    z = np.exp(2.0 * data.a_vec)[:, None] * expm(2.0 * t * l0)
    mu = np.linalg.eigvals(z)
    worst_imag = float(np.abs(mu.imag).max())
    if worst_imag >= imag_tol:
        raise NonRealSpectrum(f"imaginary part {worst_imag:.3e} >= {imag_tol:.3e}")
    mu = np.sort(mu.real)
    if mu[0] <= 0:
        raise NonPositiveEigenvalue(f"smallest eigenvalue {mu[0]:.3e} <= 0")
    return 0.5 * np.log(mu)


def s_initial(data: HyperbolicData) -> tuple[np.ndarray, np.ndarray]:
    """s_n(0) and sdot_n(0): symmetric functions of z_i = e^{2 a_i} and their rates."""
    z0 = np.exp(2.0 * data.a_vec)
    s0 = symfun.elem_sym_coords(z0)
    zdot0 = 2.0 * data.c_vec * z0
    return s0, symfun.jacobian(z0) @ zdot0


def s_exact(data: HyperbolicData, t: float, root_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Exact (s(t), q(t)) from the linear evolution sddot_n = 2 P sdot_n.

    Each s_n(t) = alpha_n + beta_n e^{2 P t}; q(t) is recovered as half the
    logs of the roots of the monic polynomial with Vieta coefficients s(t).
    """
    p = data.momentum
    if p == 0:
        raise ValueError("s route needs P = sum c_i != 0")
    s0, sdot0 = s_initial(data)
    beta = sdot0 / (2.0 * p)
    alpha = s0 - beta
    s_t = alpha + beta * np.exp(2.0 * p * t)
    roots = symfun.roots_from_coords(s_t, tol=root_tol)
    if roots[0] <= 0:
        raise NonPositiveRoot(f"smallest root {roots[0]:.3e} <= 0")
    return s_t, 0.5 * np.log(roots)


def s_derivatives(data: HyperbolicData, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(s, sdot, sddot) at time t from the closed form."""
    p = data.momentum
    s0, sdot0 = s_initial(data)
    beta = sdot0 / (2.0 * p)
    alpha = s0 - beta
    growth = np.exp(2.0 * p * t)
    return alpha + beta * growth, 2.0 * p * beta * growth, 4.0 * p * p * beta * growth


class SinhSystem(dynamics.OdeSystem):
    """Second-order sinh flow as a first-order system for the integrator."""

    name = "hyperbolic-sinh"

    def __init__(self, n: int, a: float):
        if a == 0:
            raise ValueError("a must be nonzero")
        self.n = n
        self.a = float(a)

    def pack(self, state: HyperbolicState) -> np.ndarray:
        return np.concatenate([state.lam, state.lamdot])

    def unpack(self, y: np.ndarray) -> HyperbolicState:
        return HyperbolicState(y[: self.n], y[self.n :])

    def rhs(self, t, y):
        state = HyperbolicState(y[: self.n], y[self.n :])
        return np.concatenate([state.lamdot, hyperbolic_rhs(state, self.a)])

    def positions(self, y):
        return y[: self.n]

    def reference(self, state0: HyperbolicState):
        momentum = float(np.sum(state0.lamdot))
        spectrum = None
        if np.all(state0.lamdot > 0):
            spectrum = np.sort(np.linalg.eigvalsh(lax_pair(state0, self.a)[0]))
        return momentum, spectrum

    def diagnostics(self, reference, state: HyperbolicState) -> dict[str, float]:
        momentum0, spectrum0 = reference
        out = {"momentum_drift": float(abs(np.sum(state.lamdot) - momentum0))}
        if spectrum0 is not None and np.all(state.lamdot > 0):
            spec = np.sort(np.linalg.eigvalsh(lax_pair(state, self.a)[0]))
            out["spectrum_drift"] = float(np.abs(spec - spectrum0).max())
        else:
            out["spectrum_drift"] = float("nan")
        return out


class CothSystem(dynamics.OdeSystem):
    """Second-order coth flow as a first-order system for the integrator."""

    name = "hyperbolic-coth"

    def __init__(self, n: int):
        self.n = n

    def pack(self, state: HyperbolicState) -> np.ndarray:
        return np.concatenate([state.lam, state.lamdot])

    def unpack(self, y: np.ndarray) -> HyperbolicState:
        return HyperbolicState(y[: self.n], y[self.n :])

    def rhs(self, t, y):
        state = HyperbolicState(y[: self.n], y[self.n :])
        return np.concatenate([state.lamdot, coth_rhs(state)])

    def positions(self, y):
        return y[: self.n]

    def reference(self, state0: HyperbolicState):
        return float(np.sum(state0.lamdot))

    def diagnostics(self, reference, state: HyperbolicState) -> dict[str, float]:
        return {"momentum_drift": float(abs(np.sum(state.lamdot) - reference))}


def root_function_f(data: HyperbolicData, t: float, q: float, pole_tol: float = 1e-8) -> float:
    """f(q) = sum_i (c_i / P) tanh(P t) / tanh(q - a_i) - 1.

    The coth trajectory passes through the roots of f; used as a residual
    check only.  Raises PoleProximity within ``pole_tol`` of any a_i.
    """
    p = data.momentum
    gaps = q - data.a_vec
    if np.abs(gaps).min() < pole_tol:
        raise PoleProximity(f"q within {pole_tol:g} of a pole")
    return float(np.sum((data.c_vec / p) * np.tanh(p * t) / np.tanh(gaps)) - 1.0)

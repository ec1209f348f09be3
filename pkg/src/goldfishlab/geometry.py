"""Geodesic picture of the goldfish flow.

The flow is geodesic motion for a connection whose symbols are built from an
odd pair function w; the induced metric is the pullback J^T J of the flat
metric under the symmetric-function map, and w(x) = 2/x is the one member of
the family whose curvature vanishes.  The closed-form inverse metric makes the
Hamiltonian side cheap to evaluate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import symfun
from .utils import finite_vector, pairwise_differences


@dataclass(frozen=True)
class WFunction:
    """Odd pair function w entering the connection symbols.

    ``deriv`` is d w / d x; when absent it is replaced by central differences
    with step 1e-6 * max(1, |x|).
    """

    func: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "custom"

    @classmethod
    def scaled_rational(cls, c: float) -> "WFunction":
        """w(x) = c/x."""
        return cls(
            func=lambda x: c / x,
            deriv=lambda x: -c / x**2,
            label=f"{c:g}/x",
        )

    @classmethod
    def rational(cls) -> "WFunction":
        """w(x) = 2/x, the flat member of the family."""
        return cls.scaled_rational(2.0)

    def deriv_at(self, x: np.ndarray) -> np.ndarray:
        if self.deriv is not None:
            return self.deriv(x)
        h = 1e-6 * np.maximum(1.0, np.abs(x))
        return (self.func(x + h) - self.func(x - h)) / (2.0 * h)


#: Flat choice w(x) = 2/x.
W_FLAT = WFunction.rational()


@dataclass(frozen=True)
class GeodesicState:
    """Positions q with conjugate momenta pi."""

    q: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", symfun.as_configuration(self.q))
        object.__setattr__(self, "pi", finite_vector(self.pi, self.q.size, "pi"))


def pair_weights(q, w: WFunction = W_FLAT) -> tuple[np.ndarray, np.ndarray]:
    """Matrices w_ik = -1/2 w(q_i - q_k) (zero diagonal) and their gap derivatives.

    Antisymmetry of the off-diagonal weights (oddness of w) is enforced here,
    since the curvature cancellations rely on it.
    """
    q = symfun.as_configuration(q)
    n = q.size
    gaps = pairwise_differences(q)
    off = ~np.eye(n, dtype=bool)
    wmat = np.zeros((n, n))
    wmat[off] = -0.5 * np.asarray(w.func(gaps[off]), dtype=float)
    if not np.allclose(wmat, -wmat.T, rtol=0.0, atol=1e-10 * max(1.0, np.abs(wmat).max())):
        raise ValueError("w must be odd: w(-x) = -w(x)")
    wprime = np.zeros((n, n))
    wprime[off] = -0.5 * np.asarray(w.deriv_at(gaps[off]), dtype=float)
    return wmat, wprime


def connection_symbols(q, w: WFunction = W_FLAT) -> np.ndarray:
    """Gamma^i_{jk} = delta^i_j w_ik + delta^i_k w_ij for the given w."""
    q = symfun.as_configuration(q)
    n = q.size
    wmat, _ = pair_weights(q, w)
    eye = np.eye(n)
    # [i, j, k]
    return eye[:, :, None] * wmat[:, None, :] + eye[:, None, :] * wmat[:, :, None]


def christoffel(q) -> np.ndarray:
    """Connection symbols of the goldfish flow (w = 2/x).

    Gamma^i_{jk} = -(delta^i_j (1-delta^i_k)/(q_i-q_k) + delta^i_k (1-delta^i_j)/(q_i-q_j));
    symmetric in (j,k), zero unless i is one of them.
    """
    return connection_symbols(q, W_FLAT)


def curvature(q, w: WFunction = W_FLAT) -> np.ndarray:
    """Curvature R^c_{adb} of the w-connection, dense array indexed [c,a,d,b].

    Evaluates the closed form; identically zero for w(x) = 2/x.
    """
    q = symfun.as_configuration(q)
    n = q.size
    wm, wp = pair_weights(q, w)
    eye = np.eye(n)
    i_ca = eye[:, :, None, None]
    i_cd = eye[:, None, :, None]
    i_cb = eye[:, None, None, :]
    i_ab = eye[None, :, None, :]
    i_ad = eye[None, :, :, None]
    wp_ab = wp[None, :, None, :]
    wp_ad = wp[None, :, :, None]
    wp_ca = wp[:, :, None, None]
    w_ab = wm[None, :, None, :]
    w_ba = wm.T[None, :, None, :]
    w_ca = wm[:, :, None, None]
    w_cb = wm[:, None, None, :]
    w_ad = wm[None, :, :, None]
    w_da = wm.T[None, :, :, None]
    w_cd = wm[:, None, :, None]
    return (
        i_ca * i_cd * wp_ab
        - i_ca * i_cb * wp_ad
        + wp_ca * (i_ab * i_cd - i_cb * i_ad)
        + i_cd * (w_ab * w_ca + w_ba * w_cb - w_ca * w_cb)
        - i_cb * (w_ad * w_ca + w_da * w_cd - w_ca * w_cd)
    )


def curvature_finite_difference(q, w: WFunction = W_FLAT, h: float = 1e-6) -> np.ndarray:
    """Independent curvature assembly R = dGamma + Gamma Gamma - (b <-> d).

    The derivative term is taken by central differences; used as the oracle
    against the closed form.
    """
    q = symfun.as_configuration(q)
    n = q.size
    dgamma = np.empty((n, n, n, n))  # [d, c, a, b]
    for d in range(n):
        qp = q.copy()
        qm = q.copy()
        qp[d] += h
        qm[d] -= h
        dgamma[d] = (connection_symbols(qp, w) - connection_symbols(qm, w)) / (2.0 * h)
    gam = connection_symbols(q, w)
    quad = np.einsum("eab,cde->cadb", gam, gam) - np.einsum("ead,cbe->cadb", gam, gam)
    return dgamma.transpose(1, 2, 0, 3) - dgamma.transpose(1, 2, 3, 0) + quad


def metric(q) -> np.ndarray:
    """Induced metric g = J^T J; det g is the squared Vandermonde determinant."""
    jac = symfun.jacobian(q)
    return jac.T @ jac


def _denominators(q: np.ndarray) -> np.ndarray:
    """D_i = prod_{k != i} (q_i - q_k)."""
    n = q.size
    return np.prod(pairwise_differences(q) + np.eye(n), axis=1)


def inverse_metric(q) -> np.ndarray:
    """Closed form g^{ij} = sum_{m=0}^{N-1} (q_i q_j)^m / (D_i D_j)."""
    q = symfun.as_configuration(q)
    n = q.size
    prod = np.outer(q, q)
    numer = np.zeros((n, n))
    term = np.ones((n, n))
    for _ in range(n):
        numer += term
        term = term * prod
    denom = _denominators(q)
    return numer / np.outer(denom, denom)


def inverse_metric_gradient(q) -> np.ndarray:
    """Analytic d g^{ij} / d q_k, indexed [k, i, j].

    Quotient rule over the closed form: the numerator S_ij = sum (q_i q_j)^m
    contributes delta_ki T_ij + delta_kj T_ji with T_ij = dS/dq_i, and each
    denominator contributes its logarithmic derivative.
    """
    q = symfun.as_configuration(q)
    n = q.size
    prod = np.outer(q, q)
    s = np.zeros((n, n))
    t = np.zeros((n, n))  # T[i, j] = d S_ij / d q_i
    term = np.ones((n, n))
    for m in range(n):
        s += term
        if m > 0:
            t += m * q[:, None] ** (m - 1) * q[None, :] ** m
        term = term * prod
    denom = _denominators(q)
    ginv = s / np.outer(denom, denom)

    gaps = pairwise_differences(q) + np.eye(n)
    inv_gaps = 1.0 / gaps - np.eye(n)  # 1/(q_i - q_k), zero diagonal
    # d ln D_i / d q_k: -1/(q_i - q_k) for k != i, own-gap sum for k = i
    logd = -inv_gaps.T
    np.fill_diagonal(logd, inv_gaps.sum(axis=1))

    eye = np.eye(n)
    dnum = eye[:, :, None] * t[None, :, :] + eye[:, None, :] * t.T[None, :, :]
    dlog = logd[:, :, None] + logd[:, None, :]
    return dnum / np.outer(denom, denom)[None, :, :] - ginv[None, :, :] * dlog


def inverse_metric_gradient_fd(q, h: float | None = None) -> np.ndarray:
    """Central-difference fallback for d g^{ij} / d q_k, indexed [k, i, j]."""
    q = symfun.as_configuration(q)
    n = q.size
    if h is None:
        h = 1e-6 * max(1.0, float(np.abs(q).max()))
    out = np.empty((n, n, n))
    for k in range(n):
        qp = q.copy()
        qm = q.copy()
        qp[k] += h
        qm[k] -= h
        out[k] = (inverse_metric(qp) - inverse_metric(qm)) / (2.0 * h)
    return out


def geodesic_hamiltonian(state: GeodesicState) -> float:
    """H = 1/2 pi^T g^{-1}(q) pi."""
    ginv = inverse_metric(state.q)
    return 0.5 * float(state.pi @ ginv @ state.pi)


def geodesic_rhs(state: GeodesicState) -> tuple[np.ndarray, np.ndarray]:
    """Hamilton equations: qdot = g^{-1} pi, pidot_k = -1/2 pi d g^{ij}/d q_k pi."""
    ginv = inverse_metric(state.q)
    qdot = ginv @ state.pi
    dg = inverse_metric_gradient(state.q)
    pidot = -0.5 * np.einsum("i,kij,j->k", state.pi, dg, state.pi)
    return qdot, pidot

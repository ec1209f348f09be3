"""Free symmetric-matrix dynamics and its reduction to free vector dynamics.

A straight line X(t) = X0 + t V0 in symmetric matrices, started with a
rank-one velocity, has eigenvalues that solve the goldfish equation.  This
module tracks the eigenframe R(t) two ways (direct eigendecomposition with
continuity fixing, and integration of Rdot = R M), provides the square-root
canonical chart (Q, P), and exposes the rotation-invariant vectors
u = R Q, v = R P whose motion is free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import dynamics, symfun
from .errors import (
    DegenerateRay,
    EigenvalueCollision,
    NonPositiveMomentum,
    NonPositiveVelocity,
    StepSizeUnderflow,
)
from .utils import finite_vector, orthogonality_defect, pairwise_differences, polar_orthonormalize

#: Frame orthogonality drift that triggers polar re-orthonormalization.
FRAME_DRIFT_TOL = 1e-10


@dataclass(frozen=True)
class MatrixFlow:
    """Straight-line matrix motion X(t) = X0 + t V0, both exactly symmetric."""

    x0: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        v0 = np.asarray(self.v0, dtype=float)
        for name, m in (("x0", x0), ("v0", v0)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"{name} must be square")
            if not np.array_equal(m, m.T):
                raise ValueError(f"{name} must be exactly symmetric")
        if x0.shape != v0.shape:
            raise ValueError("x0 and v0 must have equal shape")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "v0", v0)

    @property
    def n(self) -> int:
        return self.x0.shape[0]


@dataclass(frozen=True)
class ReducedChart:
    """Square-root chart: P_i = sqrt(p_i) > 0, Q_i = 2 q_i sqrt(p_i)."""

    Q: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Q", finite_vector(self.Q, name="Q"))
        object.__setattr__(self, "P", finite_vector(self.P, self.Q.size, "P"))
        if np.any(self.P <= 0):
            raise NonPositiveMomentum("chart needs P_i > 0")

    @property
    def n(self) -> int:
        return self.Q.size


@dataclass
class FrameTrajectory:
    """Orthogonal frames over a time grid, optionally with the (Q, P) curves."""

    times: np.ndarray
    frames: np.ndarray  # (n_t, N, N)
    Q: np.ndarray | None = None  # (n_t, N)
    P: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.frames = np.asarray(self.frames, dtype=float)
        worst = max(orthogonality_defect(r) for r in self.frames)
        if worst >= 1e-8:
            raise ValueError(f"stored frame fails orthogonality: defect {worst:.3e}")


def free_flow(flow: MatrixFlow, t: float) -> np.ndarray:
    """X(t) = X0 + t V0."""
    return flow.x0 + t * flow.v0


def eigen_track(
    flow: MatrixFlow,
    times,
    gap_tol: float = 1e-8,
) -> tuple[FrameTrajectory, np.ndarray]:
    """Eigendecomposition of X(t) along a grid with a continuous frame.

    Eigenvalues come out ascending.  The first frame fixes each column's sign
    by making its largest-magnitude entry positive; later frames flip columns
    to keep a positive overlap with the previous time.  Returns the frame
    trajectory and the eigenvalue curves, shape (n_t, N).
    """
    times = np.asarray(times, dtype=float)
    n = flow.n
    frames = np.empty((times.size, n, n))
    eigenvalues = np.empty((times.size, n))
    prev = None
    for k, t in enumerate(times):
        vals, vecs = np.linalg.eigh(free_flow(flow, t))
        if n > 1 and np.diff(vals).min() < gap_tol:
            raise EigenvalueCollision(
                f"eigenvalue gap {np.diff(vals).min():.3e} below {gap_tol:.3e} at t = {t:.6g}"
            )
        if prev is None:
            lead = np.abs(vecs).argmax(axis=0)
            signs = np.sign(vecs[lead, np.arange(n)])
        else:
            signs = np.sign(np.sum(prev * vecs, axis=0))
        signs[signs == 0] = 1.0
        vecs = vecs * signs
        frames[k] = vecs
        eigenvalues[k] = vals
        prev = vecs
    return FrameTrajectory(times=times, frames=frames), eigenvalues


def rank1_velocity(q0, qdot0) -> MatrixFlow:
    """Matrix data X0 = diag(q0), V0 = v v^T with v_i = sqrt(qdot0_i).

    V0 has a single positive eigenvalue sum(qdot0); the eigenvalues of
    X0 + t V0 then follow the goldfish flow with data (q0, qdot0).
    """
    q0 = symfun.as_configuration(q0)
    qdot0 = finite_vector(qdot0, q0.size, "qdot0")
    if np.any(qdot0 <= 0):
        raise NonPositiveVelocity("rank-one velocity needs qdot0_i > 0")
    v = np.sqrt(qdot0)
    return MatrixFlow(np.diag(q0), np.outer(v, v))


def canonical_transform(q, p) -> ReducedChart:
    """(q, p) -> (Q, P) with P_i = sqrt(p_i), Q_i = 2 q_i sqrt(p_i); needs p > 0."""
    q = finite_vector(q, name="q")
    p = finite_vector(p, q.size, "p")
    if np.any(p <= 0):
        raise NonPositiveMomentum("canonical transform needs p_i > 0")
    root = np.sqrt(p)
    return ReducedChart(Q=2.0 * q * root, P=root)


def canonical_transform_inverse(chart: ReducedChart) -> tuple[np.ndarray, np.ndarray]:
    """Inverse map: p = P^2, q = Q / (2 P)."""
    return chart.Q / (2.0 * chart.P), chart.P**2


def angular_momentum(chart: ReducedChart) -> np.ndarray:
    """L_ij = Q_i P_j - Q_j P_i = 2 (q_i - q_j) sqrt(p_i p_j)."""
    return np.outer(chart.Q, chart.P) - np.outer(chart.P, chart.Q)


def m_matrix(q, p) -> np.ndarray:
    """Frame generator M_ij = f_ij / q_ij^2 on the constraint surface.

    All three closed forms (f/q^2, -sqrt(p_i p_j)/q_ij and the (Q, P) form)
    are evaluated and must agree to 1e-12; the common value is returned.
    """
    q = symfun.as_configuration(q)
    p = finite_vector(p, q.size, "p")
    if np.any(p <= 0):
        raise NonPositiveMomentum("m matrix needs p_i > 0")
    n = q.size
    gaps = pairwise_differences(q) + np.eye(n)
    off = ~np.eye(n, dtype=bool)
    f = dynamics.f_from_velocities(q, p)
    m_f = f / gaps**2
    roots = np.sqrt(np.outer(p, p))
    m_root = np.where(off, -roots / gaps, 0.0)
    chart = canonical_transform(q, p)
    rays = angular_momentum(chart) + np.eye(n)
    p2 = chart.P**2
    m_qp = np.where(off, -2.0 * np.outer(p2, p2) / rays, 0.0)
    scale = max(1.0, np.abs(m_root).max())
    if np.abs(m_f - m_root).max() > 1e-12 * scale or np.abs(m_qp - m_root).max() > 1e-12 * scale:
        raise AssertionError("closed forms of M disagree beyond 1e-12")
    return m_root


def qp_rhs(chart: ReducedChart) -> tuple[np.ndarray, np.ndarray]:
    """Motion in the square-root chart.

    Qdot_i = 2 P_i^3 + 2 Q_i P_i s_i and Pdot_i = 2 P_i^2 s_i with
    s_i = sum_{j != i} P_j^3 / (Q_i P_j - Q_j P_i); the combination
    Qdot_i P_i - Q_i Pdot_i equals 2 P_i^4.
    """
    n = chart.n
    rays = angular_momentum(chart)
    off = ~np.eye(n, dtype=bool)
    if n > 1 and np.abs(rays[off]).min() == 0.0:
        raise DegenerateRay("Q_i P_j - Q_j P_i vanished for some pair")
    inv = np.where(off, 1.0 / (rays + np.eye(n)), 0.0)
    s = inv @ chart.P**3
    qdot = 2.0 * chart.P**3 + 2.0 * chart.Q * chart.P * s
    pdot = 2.0 * chart.P**2 * s
    return qdot, pdot


def frame_flow(
    q0,
    qdot0,
    times,
    config: dynamics.IntegratorConfig | None = None,
) -> FrameTrajectory:
    """Integrate the goldfish flow together with Rdot = R M from R(0) = I.

    The frame is checked at every grid point and polar-projected back onto the
    orthogonal group whenever its defect exceeds FRAME_DRIFT_TOL.  Velocities
    must stay positive (square roots inside M).
    """
    config = config or dynamics.IntegratorConfig()
    times = np.asarray(times, dtype=float)
    if times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("need a strictly increasing grid with >= 2 points")
    q0 = symfun.as_configuration(q0)
    n = q0.size
    qdot0 = finite_vector(qdot0, n, "qdot0")
    if np.any(qdot0 <= 0):
        raise NonPositiveVelocity("frame flow needs qdot0_i > 0")

    def rhs(t, y):
        q = y[:n]
        qdot = y[n : 2 * n]
        r = y[2 * n :].reshape(n, n)
        gaps = pairwise_differences(q) + np.eye(n)
        inv = 1.0 / gaps - np.eye(n)
        acc = 2.0 * qdot * (inv @ qdot)
        m = -np.sqrt(np.outer(qdot, qdot)) * inv
        return np.concatenate([qdot, acc, (r @ m).ravel()])

    y = np.concatenate([q0, qdot0, np.eye(n).ravel()])
    frames = np.empty((times.size, n, n))
    qs = np.empty((times.size, n))
    qds = np.empty((times.size, n))
    frames[0] = np.eye(n)
    qs[0], qds[0] = q0, qdot0
    for k in range(1, times.size):
        sol = solve_ivp(
            rhs,
            (times[k - 1], times[k]),
            y,
            method="RK45",
            rtol=config.rel_tol,
            atol=config.abs_tol,
            max_step=config.max_step,
            t_eval=[times[k]],
        )
        if sol.status != 0:
            raise StepSizeUnderflow(sol.message, time=times[k])
        y = sol.y[:, -1]
        r = y[2 * n :].reshape(n, n)
        if orthogonality_defect(r) > FRAME_DRIFT_TOL:
            r = polar_orthonormalize(r)
            y = np.concatenate([y[: 2 * n], r.ravel()])
        frames[k] = r
        qs[k] = y[:n]
        qds[k] = y[n : 2 * n]

    charts = [canonical_transform(qs[k], qds[k]) for k in range(times.size)]
    return FrameTrajectory(
        times=times,
        frames=frames,
        Q=np.vstack([c.Q for c in charts]),
        P=np.vstack([c.P for c in charts]),
    )


def invariant_vectors(ft: FrameTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """u(t) = R(t) Q(t) and v(t) = R(t) P(t); v is constant and u linear in t."""
    if ft.Q is None or ft.P is None:
        raise ValueError("frame trajectory has no (Q, P) curves")
    u = np.einsum("tij,tj->ti", ft.frames, ft.Q)
    v = np.einsum("tij,tj->ti", ft.frames, ft.P)
    return u, v


def free_vector_hamiltonian(u: np.ndarray, v: np.ndarray) -> float:
    """H[u, v] = 1/2 (v.v)^2, the reduced free-vector generator."""
    vv = float(np.dot(v, v))
    return 0.5 * vv * vv

"""Right-hand sides, conserved quantities, exact solver and integrator.

The goldfish system is solved two independent ways: by adaptive
Runge-Kutta integration of the second-order equations of motion, and exactly
through the flat coordinates, where the motion is a straight line and the
positions come back as polynomial roots.  The spin-extended system evolves
(q, p, f) and reduces to the goldfish flow on the constraint surface G = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import geometry, poisson, symfun
from .errors import (
    CollisionDetected,
    NonPositiveVelocity,
    NegativeMomentum,
    StepSizeUnderflow,
)
from .utils import (
    antisymmetric_from_upper,
    check_antisymmetric,
    finite_vector,
    min_pairwise_gap,
    pairwise_differences,
    upper_triangle,
)


# ---------------------------------------------------------------------------
# states and configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoldfishState:
    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", symfun.as_configuration(self.q))
        object.__setattr__(self, "qdot", finite_vector(self.qdot, self.q.size, "qdot"))

    @property
    def n(self) -> int:
        return self.q.size


@dataclass(frozen=True)
class ECMState:
    """Positions, momenta and antisymmetric spin matrix (stored upper triangle)."""

    q: np.ndarray
    p: np.ndarray
    f_upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", symfun.as_configuration(self.q))
        n = self.q.size
        object.__setattr__(self, "p", finite_vector(self.p, n, "p"))
        fu = np.asarray(self.f_upper, dtype=float)
        if fu.ndim == 2:
            fu = upper_triangle(check_antisymmetric(fu, n))
        object.__setattr__(self, "f_upper", finite_vector(fu, n * (n - 1) // 2, "f_upper"))

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def f(self) -> np.ndarray:
        return antisymmetric_from_upper(self.f_upper, self.n)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    collision_gap: float = symfun.COLLISION_TOL

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")


@dataclass
class Trajectory:
    """Time grid, per-time states, and named per-time diagnostic residuals."""

    times: np.ndarray
    states: list[Any]
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if len(self.states) != self.times.size:
            raise ValueError("one state per time required")


# ---------------------------------------------------------------------------
# right-hand sides and conserved quantities
# ---------------------------------------------------------------------------

def goldfish_rhs(state: GoldfishState) -> np.ndarray:
    """Accelerations qddot_i = 2 sum_{j != i} qdot_i qdot_j / (q_i - q_j)."""
    n = state.n
    gaps = pairwise_differences(state.q) + np.eye(n)
    inv = 1.0 / gaps - np.eye(n)
    return 2.0 * state.qdot * (inv @ state.qdot)


def ecm_rhs(state: ECMState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(qdot, pdot, fdot) of the spin system.

    qdot = p, pdot_i = 2 sum_k f_ik^2/(q_i-q_k)^3, and
    fdot_ij = -sum_{k != i,j} f_ik f_kj (1/q_ik^2 - 1/q_kj^2).
    """
    n = state.n
    f = state.f
    gaps = pairwise_differences(state.q) + np.eye(n)
    ratios = f**2 / gaps**3
    np.fill_diagonal(ratios, 0.0)
    pdot = 2.0 * ratios.sum(axis=1)
    inv2 = 1.0 / gaps**2 - np.eye(n)
    # fdot_ij = -sum_k f_ik f_kj / q_ik^2 + sum_k f_ik f_kj / q_kj^2
    fdot = -(f * inv2) @ f + f @ (inv2 * f)
    return state.p.copy(), pdot, fdot


def ecm_hamiltonian(state: ECMState) -> float:
    """H = 1/2 sum p^2 + 1/2 sum_{i != j} f_ij^2/(q_i - q_j)^2."""
    n = state.n
    gaps = pairwise_differences(state.q) + np.eye(n)
    off = ~np.eye(n, dtype=bool)
    return 0.5 * float(np.sum(state.p**2)) + 0.5 * float(np.sum(state.f[off] ** 2 / gaps[off] ** 2))


def ecm_hamiltonian_g(state: ECMState) -> float:
    """The Hamiltonian rewritten through the constraint values G_ij.

    H = 1/2 (sum p)^2 + 1/8 sum G^2/(q-q)^2 - 1/2 sum G sqrt(p p)/(q-q); the
    cross-term coefficient -1/2 makes this an exact rewriting (on G = 0 it
    collapses to P^2/2).  Requires p >= 0.
    """
    n = state.n
    if np.any(state.p < 0):
        raise NegativeMomentum("G-form needs p_i >= 0")
    gaps = pairwise_differences(state.q) + np.eye(n)
    off = ~np.eye(n, dtype=bool)
    g = poisson.g_constraints(state.q, state.p, state.f)
    roots = np.sqrt(np.outer(state.p, state.p))
    return (
        0.5 * float(np.sum(state.p)) ** 2
        + 0.125 * float(np.sum(g[off] ** 2 / gaps[off] ** 2))
        - 0.5 * float(np.sum(g[off] * roots[off] / gaps[off]))
    )


def f_from_velocities(q, qdot) -> np.ndarray:
    """Constraint-surface spin f_ij = -(q_i - q_j) sqrt(qdot_i qdot_j).

    Velocities must be strictly positive; mixed signs are rejected rather than
    extended by an unstated sign convention.
    """
    q = symfun.as_configuration(q)
    qdot = finite_vector(qdot, q.size, "qdot")
    if np.any(qdot <= 0):
        raise NonPositiveVelocity("f construction needs qdot_i > 0")
    return -pairwise_differences(q) * np.sqrt(np.outer(qdot, qdot))


def conserved_bn(state: GoldfishState) -> np.ndarray:
    """Conserved b_n = (J(q) qdot)_n, the flat-coordinate velocities."""
    return symfun.jacobian(state.q) @ state.qdot


def total_momentum(state) -> float:
    """Sum of velocities (goldfish) or momenta (spin chart); equals b_1."""
    if isinstance(state, GoldfishState):
        return float(np.sum(state.qdot))
    if isinstance(state, ECMState):
        return float(np.sum(state.p))
    raise TypeError(f"unsupported state type {type(state).__name__}")


# ---------------------------------------------------------------------------
# exact goldfish solver
# ---------------------------------------------------------------------------

def goldfish_exact(state0: GoldfishState, t: float, root_tol: float = 1e-9) -> np.ndarray:
    """Positions at time t from the straight flat-coordinate line.

    x(t) = x(0) + t b; positions are the polynomial roots of x(t), sorted
    ascending.  Raises ComplexRoots / RootCollision once the real,
    collision-free sector is left.
    """
    x = symfun.elem_sym_coords(state0.q) + t * conserved_bn(state0)
    return symfun.roots_from_coords(x, tol=root_tol)


def goldfish_exact_state(state0: GoldfishState, t: float) -> GoldfishState:
    """Exact state at time t; velocities from qdot = J^{-1} b."""
    q = goldfish_exact(state0, t)
    qdot = symfun.jacobian_inverse(q) @ conserved_bn(state0)
    return GoldfishState(q, qdot)


def goldfish_exact_trajectory(state0: GoldfishState, times) -> np.ndarray:
    """Exact positions on a time grid, shape (len(times), N)."""
    times = np.asarray(times, dtype=float)
    return np.vstack([goldfish_exact(state0, t) for t in times])


# ---------------------------------------------------------------------------
# systems seen by the integrator
# ---------------------------------------------------------------------------

class OdeSystem:
    """Adapter between a model state and the flat vector the integrator sees."""

    name = "custom"

    def pack(self, state) -> np.ndarray:
        raise NotImplementedError

    def unpack(self, y: np.ndarray):
        raise NotImplementedError

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def positions(self, y: np.ndarray) -> np.ndarray | None:
        """Coordinates monitored for collisions; None disables monitoring."""
        return None

    def reference(self, state0):
        """Values frozen at t = 0 that the diagnostics drift against."""
        return None

    def diagnostics(self, reference, state) -> dict[str, float]:
        return {}


class GoldfishSystem(OdeSystem):
    name = "goldfish"

    def __init__(self, n: int):
        self.n = n

    def pack(self, state: GoldfishState) -> np.ndarray:
        return np.concatenate([state.q, state.qdot])

    def unpack(self, y: np.ndarray) -> GoldfishState:
        return GoldfishState(y[: self.n], y[self.n :])

    def rhs(self, t, y):
        n = self.n
        q = y[:n]
        qdot = y[n:]
        gaps = pairwise_differences(q) + np.eye(n)
        inv = 1.0 / gaps - np.eye(n)
        return np.concatenate([qdot, 2.0 * qdot * (inv @ qdot)])

    def positions(self, y):
        return y[: self.n]

    def reference(self, state0: GoldfishState):
        return conserved_bn(state0)

    def diagnostics(self, reference, state: GoldfishState) -> dict[str, float]:
        b = conserved_bn(state)
        return {
            "bn_drift": float(np.abs(b - reference).max()),
            "momentum_drift": float(abs(b[0] - reference[0])),
        }


class EcmSystem(OdeSystem):
    name = "ecm"

    def __init__(self, n: int):
        self.n = n
        self.nf = n * (n - 1) // 2

    def pack(self, state: ECMState) -> np.ndarray:
        return np.concatenate([state.q, state.p, state.f_upper])

    def unpack(self, y: np.ndarray) -> ECMState:
        n = self.n
        return ECMState(y[:n], y[n : 2 * n], y[2 * n :])

    def rhs(self, t, y):
        n = self.n
        q = y[:n]
        p = y[n : 2 * n]
        f = antisymmetric_from_upper(y[2 * n :], n)
        gaps = pairwise_differences(q) + np.eye(n)
        ratios = f**2 / gaps**3
        np.fill_diagonal(ratios, 0.0)
        pdot = 2.0 * ratios.sum(axis=1)
        inv2 = 1.0 / gaps**2 - np.eye(n)
        fdot = -(f * inv2) @ f + f @ (inv2 * f)
        return np.concatenate([p, pdot, fdot[np.triu_indices(n, 1)]])

    def positions(self, y):
        return y[: self.n]

    def reference(self, state0: ECMState):
        return ecm_hamiltonian(state0)

    def diagnostics(self, reference, state: ECMState) -> dict[str, float]:
        out = {"energy_drift": float(abs(ecm_hamiltonian(state) - reference))}
        if np.all(state.p >= 0):
            g = poisson.g_constraints(state.q, state.p, state.f)
            out["constraint_norm"] = float(np.linalg.norm(g))
        else:
            out["constraint_norm"] = float("nan")
        return out


class GeodesicSystem(OdeSystem):
    name = "geodesic"

    def __init__(self, n: int):
        self.n = n

    def pack(self, state: geometry.GeodesicState) -> np.ndarray:
        return np.concatenate([state.q, state.pi])

    def unpack(self, y: np.ndarray) -> geometry.GeodesicState:
        return geometry.GeodesicState(y[: self.n], y[self.n :])

    def rhs(self, t, y):
        qdot, pidot = geometry.geodesic_rhs(self.unpack(y))
        return np.concatenate([qdot, pidot])

    def positions(self, y):
        return y[: self.n]

    def reference(self, state0):
        return geometry.geodesic_hamiltonian(state0)

    def diagnostics(self, reference, state) -> dict[str, float]:
        return {"energy_drift": float(abs(geometry.geodesic_hamiltonian(state) - reference))}


class CustomSystem(OdeSystem):
    """Bare first-order system ydot = rhs(t, y); states are plain vectors."""

    name = "custom"

    def __init__(self, rhs: Callable[[float, np.ndarray], np.ndarray], name: str = "custom"):
        self._rhs = rhs
        self.name = name

    def pack(self, state):
        return np.asarray(state, dtype=float)

    def unpack(self, y):
        return y.copy()

    def rhs(self, t, y):
        return np.asarray(self._rhs(t, y), dtype=float)


_SYSTEM_FACTORIES = {
    "goldfish": lambda state: GoldfishSystem(state.n),
    "ecm": lambda state: EcmSystem(state.n),
    "geodesic": lambda state: GeodesicSystem(state.q.size),
}


def _resolve_system(system, state0) -> OdeSystem:
    if isinstance(system, OdeSystem):
        return system
    if isinstance(system, str):
        try:
            return _SYSTEM_FACTORIES[system](state0)
        except KeyError:
            raise ValueError(
                f"unknown system {system!r}; use one of {sorted(_SYSTEM_FACTORIES)} "
                "or pass an OdeSystem instance"
            ) from None
    raise TypeError("system must be a name or an OdeSystem")


# ---------------------------------------------------------------------------
# integrator
# ---------------------------------------------------------------------------

def integrate(
    system,
    state0,
    t_span,
    config: IntegratorConfig | None = None,
    output_points: int = 101,
) -> Trajectory:
    """Adaptive embedded Runge-Kutta 5(4) run with dense output on a uniform grid.

    ``system`` is a name ("goldfish", "ecm", "geodesic") or an OdeSystem.  The
    minimal pairwise gap of the monitored positions is watched continuously;
    crossing ``config.collision_gap`` aborts with CollisionDetected carrying
    the partial trajectory.  Diagnostics are evaluated at output grid points.
    """
    config = config or IntegratorConfig()
    if output_points < 2:
        raise ValueError("need at least two output points")
    if np.isscalar(t_span):
        t0, t1 = 0.0, float(t_span)
    else:
        t0, t1 = (float(t) for t in t_span)
    if not np.isfinite(t0) or not np.isfinite(t1) or t1 <= t0:
        raise ValueError("t_span must be finite with t1 > t0")

    sys_ = _resolve_system(system, state0)
    y0 = sys_.pack(state0)
    grid = np.linspace(t0, t1, output_points)

    events = []
    if sys_.positions(y0) is not None and sys_.positions(y0).size > 1:

        def gap_event(t, y):
            return min_pairwise_gap(np.sort(sys_.positions(y))) - config.collision_gap

        gap_event.terminal = True
        gap_event.direction = -1.0
        events.append(gap_event)

    sol = solve_ivp(
        sys_.rhs,
        (t0, t1),
        y0,
        method="RK45",
        rtol=config.rel_tol,
        atol=config.abs_tol,
        max_step=config.max_step,
        t_eval=grid,
        events=events or None,
    )

    def build(times, ys):
        states = [sys_.unpack(ys[:, k]) for k in range(times.size)]
        reference = sys_.reference(state0)
        diag_rows = [sys_.diagnostics(reference, s) for s in states]
        diagnostics = {}
        if diag_rows and diag_rows[0]:
            for key in diag_rows[0]:
                diagnostics[key] = np.array([row[key] for row in diag_rows])
        return Trajectory(times=times, states=states, diagnostics=diagnostics)

    def build_partial(times, ys):
        # near-failure states may violate state invariants; salvage what is valid
        while times.size:
            try:
                return build(times, ys)
            except ValueError:
                times = times[:-1]
                ys = ys[:, :-1]
        return None

    if sol.status == 1:  # terminal event: collision
        t_hit = float(sol.t_events[0][0])
        raise CollisionDetected(
            f"pairwise gap fell below {config.collision_gap:g} at t = {t_hit:.6g}",
            partial=build_partial(sol.t, sol.y),
            time=t_hit,
        )
    if sol.status != 0:
        raise StepSizeUnderflow(
            sol.message,
            partial=build_partial(sol.t, sol.y),
            time=float(sol.t[-1]) if sol.t.size else t0,
        )

    return build(sol.t, sol.y)

"""Trajectory integration under the Bohm velocity or its osmotic extension.

Two velocity modes: the classic phase-gradient field v_i, and the augmented
field v_i + u_(i,+/-) in which even stationary states move.  Integration is
fixed-step classical RK4, with local step halving when a stage velocity
exceeds the speed ceiling and a clean abort when the density drops below the
node threshold.  Everything here is pure: identical inputs give bitwise
identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fields
from .errors import DomainError, NodeError, UsageError
from .fields import DEFAULT_NODE_EPSILON, EnergyBudget
from .states import WavefunctionModel, as_positions

__all__ = [
    "VelocityMode",
    "BOHM",
    "augmented",
    "IntegratorSettings",
    "Trajectory",
    "total_velocity",
    "integrate_trajectory",
    "budget_drift",
    "advect_samples",
]


@dataclass(frozen=True)
class VelocityMode:
    """Which velocity field drives the trajectory."""

    kind: str                 # "bohm" | "augmented"
    sign: Optional[int] = None  # +1 or -1, required iff kind == "augmented"

    def __post_init__(self):
        if self.kind not in ("bohm", "augmented"):
            raise DomainError(f"unknown velocity mode {self.kind!r}")
        if self.kind == "augmented" and self.sign not in (+1, -1):
            raise DomainError("augmented mode needs sign +1 or -1")
        if self.kind == "bohm" and self.sign is not None:
            raise DomainError("bohm mode takes no sign")


BOHM = VelocityMode("bohm")


def augmented(sign: int) -> VelocityMode:
    return VelocityMode("augmented", sign)


@dataclass(frozen=True)
class IntegratorSettings:
    dt: float = 1e-3
    scheme: str = "rk4"
    node_epsilon: float = DEFAULT_NODE_EPSILON
    max_steps: int = 1_000_000
    speed_ceiling: float = 1e6   # stage speed above this rejects and halves the step
    store_every: int = 1
    store_budgets: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.scheme != "rk4":
            raise DomainError("only the rk4 scheme is implemented")
        if self.max_steps < 1:
            raise DomainError("max_steps must be at least 1")
        if self.speed_ceiling <= 0:
            raise DomainError("speed_ceiling must be positive")
        if self.store_every < 1:
            raise DomainError("store_every must be at least 1")


@dataclass(frozen=True)
class Trajectory:
    """Time series of one integrated initial condition."""

    times: np.ndarray           # (m,)
    positions: np.ndarray       # (m, n, d)
    velocities: np.ndarray      # (m, n, d)
    budgets: tuple              # per stored point: EnergyBudget or None
    termination: str            # "completed" | "node_abort" | "step_limit"
    mode: VelocityMode
    budget_kind: Optional[str]  # "stationary" | "dynamic" | None

    @property
    def final_positions(self) -> np.ndarray:
        return self.positions[-1]


def total_velocity(
    model: WavefunctionModel, config, t: float, mode: VelocityMode,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> np.ndarray:
    """Velocity of every particle, shape (n, d): v_i, or v_i + u_(i,sign).

    The density is checked against node_epsilon before any division.
    """
    xs = as_positions(config, model)
    f = fields.raw_fields(model, xs, t)
    dens = float(f["density"])
    if dens < node_epsilon:
        raise NodeError(dens, node_epsilon)
    scale = model.hbar / model.mass
    vel = scale * np.imag(f["w"])
    if mode.kind == "augmented":
        vel = vel + mode.sign * scale * np.real(f["w"])
    return vel


def _max_speed(vel: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(vel, axis=-1)))


def integrate_trajectory(
    model: WavefunctionModel,
    x0,
    t0: float,
    t1: float,
    mode: VelocityMode = BOHM,
    settings: IntegratorSettings = IntegratorSettings(),
) -> Trajectory:
    """Fixed-step RK4 advance of dx/dt = total_velocity from t0 to t1.

    The nominal step is shrunk so the steps tile [t0, t1] exactly.  A step in
    which any stage exceeds the speed ceiling is retried at half the step (up
    to 20 halvings) before giving up; hitting a node at any stage aborts the
    trajectory cleanly with termination "node_abort".
    """
    if t1 <= t0:
        raise DomainError("t1 must exceed t0")
    xs = as_positions(x0, model).astype(float)
    dt = settings.dt

    def rhs(x, t):
        return total_velocity(model, x, t, mode, settings.node_epsilon)

    times = [t0]
    points = [xs.copy()]
    vels = [rhs(xs, t0)]
    budgets = [_point_budget(model, xs, t0, settings)]

    def store(t, xs):
        times.append(t)
        points.append(xs.copy())
        try:
            vels.append(rhs(xs, t))
        except NodeError:
            vels.append(np.full_like(xs, np.nan))
            budgets.append(None)
            return False
        budgets.append(_point_budget(model, xs, t, settings))
        return True

    termination = "completed"
    t = t0
    step = 0
    eps_t = 1e-12 * max(1.0, abs(t1))
    while t1 - t > eps_t:
        if step >= settings.max_steps:
            termination = "step_limit"
            break
        try:
            xs, t = _rk4_step(rhs, xs, t, min(dt, t1 - t), settings.speed_ceiling)
        except (NodeError, _SpeedCeiling):
            termination = "node_abort"
            break
        step += 1
        if step % settings.store_every == 0 or t1 - t <= eps_t:
            if not store(t, xs):
                termination = "node_abort"
                break
    if termination != "completed" and times[-1] < t - eps_t:
        # make sure the abort point itself is recorded
        store(t, xs)

    budget_kind = None
    if settings.store_budgets:
        budget_kind = "stationary" if model.is_stationary else "dynamic"
    return Trajectory(
        times=np.asarray(times),
        positions=np.asarray(points),
        velocities=np.asarray(vels),
        budgets=tuple(budgets),
        termination=termination,
        mode=mode,
        budget_kind=budget_kind,
    )


class _SpeedCeiling(Exception):
    pass


def _rk4_step(rhs, xs, t, dt, speed_ceiling):
    """One RK4 step with rejection-and-halving on excessive stage speeds."""
    for attempt in range(21):
        h = dt / 2.0**attempt
        try:
            k1 = rhs(xs, t)
            if _max_speed(k1) > speed_ceiling:
                continue
            k2 = rhs(xs + 0.5 * h * k1, t + 0.5 * h)
            if _max_speed(k2) > speed_ceiling:
                continue
            k3 = rhs(xs + 0.5 * h * k2, t + 0.5 * h)
            if _max_speed(k3) > speed_ceiling:
                continue
            k4 = rhs(xs + h * k3, t + h)
            if _max_speed(k4) > speed_ceiling:
                continue
        except NodeError:
            raise
        return xs + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t + h
    raise _SpeedCeiling


def _point_budget(model, xs, t, settings) -> Optional[EnergyBudget]:
    if not settings.store_budgets:
        return None
    try:
        if model.is_stationary:
            return fields.stationary_budget(model, xs, node_epsilon=settings.node_epsilon)
        return fields.energy_budget(model, xs, t, node_epsilon=settings.node_epsilon)
    except NodeError:
        return None


def budget_drift(trajectory: Trajectory) -> float:
    """Largest deviation of the stored budget totals from the eigenvalue.

    Only meaningful for stationary models, where the pointwise balance says
    the budget total equals the energy at every configuration.
    """
    if trajectory.budget_kind != "stationary":
        raise UsageError("budget_drift needs a trajectory with stationary budgets")
    stored = [b for b in trajectory.budgets if b is not None]
    if not stored:
        raise UsageError("trajectory carries no stored budgets")
    return max(abs(b.residual) for b in stored)


# ---------------------------------------------------------------------------
# Vectorized ensemble transport
# ---------------------------------------------------------------------------

def advect_samples(
    model: WavefunctionModel,
    xs0: np.ndarray,
    t0: float,
    t1: float,
    mode: VelocityMode = BOHM,
    dt: float = 2.5e-3,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
):
    """Transport a batch of configurations (m, n, d) along the velocity field.

    Fixed-step RK4 vectorized over samples; samples whose density falls below
    node_epsilon at any stage are frozen at their pre-step position and
    flagged dead.  (No per-sample step halving here; ensembles tolerate a few
    aborted members, which the caller reports.)  Returns (positions, alive).
    """
    if t1 <= t0:
        raise DomainError("t1 must exceed t0")
    xs = np.array(xs0, dtype=float)
    m = xs.shape[0]
    alive = np.ones(m, dtype=bool)
    n_steps = max(1, int(round((t1 - t0) / dt)))
    h = (t1 - t0) / n_steps
    scale = model.hbar / model.mass
    sign = mode.sign if mode.kind == "augmented" else None

    def stage_velocity(pts, t, ok):
        f = fields.raw_fields(model, pts, t)
        bad = f["density"] < node_epsilon
        ok &= ~bad
        vel = scale * np.imag(f["w"])
        if sign is not None:
            vel = vel + sign * scale * np.real(f["w"])
        vel[~ok] = 0.0
        return vel, ok

    t = t0
    for step in range(n_steps):
        ok = alive.copy()
        k1, ok = stage_velocity(xs, t, ok)
        k2, ok = stage_velocity(xs + 0.5 * h * k1, t + 0.5 * h, ok)
        k3, ok = stage_velocity(xs + 0.5 * h * k2, t + 0.5 * h, ok)
        k4, ok = stage_velocity(xs + h * k3, t + h, ok)
        move = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        move[~ok] = 0.0
        bad_move = ~np.isfinite(move).all(axis=(1, 2))
        move[bad_move] = 0.0
        ok &= ~bad_move
        xs = xs + move
        alive = ok
        t = t0 + (step + 1) * h
    return xs, alive

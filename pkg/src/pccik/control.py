"""PD plus feedforward tracking control and the closed-loop simulation loop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    DynamicsParams,
    DynState,
    IntegrationError,
    config_from_state,
    gravity_vector,
    mass_matrix,
    pressures_from_tau,
    robot_input_mapping,
    state_size,
    step_dynamics,
    stiffness_vector,
)
from .geometry import RobotSpec, task_coordinates, tip_position
from .trajectory import Trajectory


def _diagonal(gain) -> np.ndarray:
    g = np.asarray(gain, dtype=float)
    if g.ndim == 2:
        if g.shape[0] != g.shape[1] or np.any(g != np.diag(np.diag(g))):
            raise ValueError("gain matrices must be square and diagonal")
        return np.diag(g).copy()
    return g


@dataclass(frozen=True)
class Gains:
    kp: float | tuple = 1000.0
    kv: float | tuple = 5.0

    def __post_init__(self):
        kp, kv = (_diagonal(g) for g in (self.kp, self.kv))
        if np.any(kp <= 0):
            raise ValueError("kp must be positive")
        if np.any(kv < 0):
            raise ValueError("kv must be non-negative")

    def vectors(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Diagonals of the gain matrices, broadcast to ``size``."""
        out = []
        for g in (self.kp, self.kv):
            g = _diagonal(g)
            if g.ndim == 0:
                g = np.full(size, float(g))
            elif g.shape != (size,):
                raise ValueError(f"gain has shape {g.shape}, expected ({size},)")
            out.append(g)
        return out[0], out[1]


def control_law(q, qdot, q_d, qdot_d, gains: Gains, robot: RobotSpec,
                params: DynamicsParams | None = None, inertia_weighted: bool = False) -> np.ndarray:
    """PD on the state error plus stiffness and gravity feedforward at ``q_d``.

    ``tau = a + K(q_d) + G(q_d)`` with ``a = kp (q_d - q) + kv (qdot_d - qdot)``.
    With ``inertia_weighted`` the command is scaled by ``M(q)`` first, so the
    gains act as closed-loop natural frequency squared and damping rate.
    """
    params = params or DynamicsParams()
    q, qdot, q_d, qdot_d = (np.asarray(v, dtype=float) for v in (q, qdot, q_d, qdot_d))
    n = state_size(robot)
    if not (q.shape == qdot.shape == q_d.shape == qdot_d.shape == (n,)):
        raise ValueError(f"state vectors must all have length {n}")
    kp, kv = gains.vectors(n)
    accel = kp * (q_d - q) + kv * (qdot_d - qdot)
    if inertia_weighted:
        accel = mass_matrix(robot, q) @ accel
    return accel + stiffness_vector(q_d, params.stiffness, robot) + gravity_vector(robot, q_d)


@dataclass(frozen=True)
class SimulationSettings:
    control_rate: float = 250.0  # Hz
    dt: float = 1e-3  # s, integrator step
    duration: float | None = None  # defaults to the last desired timestamp
    inertia_weighted: bool = True
    use_pressures: bool = False

    def __post_init__(self):
        if not self.control_rate > 0:
            raise ValueError("control_rate must be positive")
        if not 0.0 < self.dt <= 0.01:
            raise ValueError("dt must lie in (0, 0.01]")
        period = 1.0 / self.control_rate
        sub = round(period / self.dt)
        if sub < 1 or abs(sub * self.dt - period) > 1e-9 * period:
            raise ValueError("the control period must be a whole number of integrator steps")

    @property
    def substeps(self) -> int:
        return round(1.0 / (self.control_rate * self.dt))


@dataclass
class TrackingTrace:
    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    q_d: np.ndarray
    tau: np.ndarray
    u: np.ndarray | None
    tip: np.ndarray
    error: np.ndarray  # distance from tip to the tip of q_d

    def __len__(self):
        return len(self.t)

    def columns(self) -> tuple[list[str], np.ndarray]:
        """Header and numeric table for CSV output."""
        n = self.q.shape[1]
        names = ["t"]
        names += [f"q{i}" for i in range(n)] + [f"qdot{i}" for i in range(n)]
        names += [f"qd{i}" for i in range(n)] + [f"tau{i}" for i in range(n)]
        blocks = [self.t[:, None], self.q, self.qdot, self.q_d, self.tau]
        if self.u is not None:
            names += [f"u{i}" for i in range(self.u.shape[1])]
            blocks.append(self.u)
        names += ["tip_x", "tip_y", "tip_z", "error_mm"]
        blocks += [self.tip, self.error[:, None]]
        return names, np.hstack(blocks)


def _hold_index(times: np.ndarray, t: float) -> int:
    """Index of the sample in effect at ``t`` under a zero-order hold."""
    return max(int(np.searchsorted(times, t + 1e-12, side="right")) - 1, 0)


def simulate_tracking(robot: RobotSpec, desired_q, desired_times, gains: Gains,
                      params: DynamicsParams | None = None,
                      settings: SimulationSettings | None = None,
                      initial: DynState | None = None,
                      model_robot: RobotSpec | None = None,
                      model_params: DynamicsParams | None = None) -> TrackingTrace:
    """Run the closed loop on ``robot`` from ``initial`` (default: rest).

    The desired states are held between their timestamps. At each control
    tick the law is evaluated on the controller's model (``model_robot`` and
    ``model_params``, defaulting to the plant) and the torque is held while
    the plant is integrated with RK4. With ``use_pressures`` the torque is
    first mapped to clamped bellows pressures and back.
    """
    params = params or DynamicsParams()
    settings = settings or SimulationSettings()
    model_robot = model_robot or robot
    model_params = model_params or params
    desired_q = np.atleast_2d(np.asarray(desired_q, dtype=float))
    times = np.asarray(desired_times, dtype=float)
    n = state_size(robot)
    if desired_q.shape[1] != n or len(desired_q) == 0:
        raise ValueError(f"desired states must have shape (N, {n})")
    if len(times) != len(desired_q) or np.any(np.diff(times) <= 0):
        raise ValueError("desired times must be strictly increasing, one per state")
    duration = settings.duration if settings.duration is not None else times[-1] - times[0]
    if not duration > 0:
        raise ValueError("simulation time must be positive")

    period = 1.0 / settings.control_rate
    ticks = int(math.floor(duration / period + 1e-9))
    state = initial or DynState.zeros(robot)
    if state.q.size != n:
        raise ValueError("initial state does not match robot")
    H = robot_input_mapping(robot, params.actuation) if settings.use_pressures else None
    limits = (0.0, params.actuation.p_max)

    rec = {k: [] for k in ("t", "q", "qdot", "q_d", "tau", "u", "tip", "error")}
    zero = np.zeros(n)
    for k in range(ticks + 1):
        t = times[0] + k * period
        qd = desired_q[_hold_index(times, t)]
        tau = control_law(state.q, state.qdot, qd, zero, gains, model_robot, model_params,
                          settings.inertia_weighted)
        if H is not None:
            sol = pressures_from_tau(H, tau, limits)
            rec["u"].append(sol.u)
            tau = H @ sol.u
        tip = tip_position(robot, config_from_state(state.q, robot))
        tip_d = tip_position(robot, config_from_state(qd, robot))
        rec["t"].append(t)
        rec["q"].append(state.q)
        rec["qdot"].append(state.qdot)
        rec["q_d"].append(qd)
        rec["tau"].append(tau)
        rec["tip"].append(tip)
        rec["error"].append(float(np.linalg.norm(tip - tip_d)))
        if k == ticks:
            break
        try:
            for _ in range(settings.substeps):
                state = step_dynamics(robot, state, tau, settings.dt, params)
        except IntegrationError as exc:
            raise IntegrationError(f"tick {k} (t = {t:.4f} s): {exc}", exc.state, k) from exc

    return TrackingTrace(
        t=np.array(rec["t"]), q=np.array(rec["q"]), qdot=np.array(rec["qdot"]),
        q_d=np.array(rec["q_d"]), tau=np.array(rec["tau"]),
        u=np.array(rec["u"]) if H is not None else None,
        tip=np.array(rec["tip"]), error=np.array(rec["error"]),
    )


@dataclass(frozen=True)
class TrackingMetrics:
    mean_error: float  # mm, whole trace
    max_error: float  # mm, whole trace
    steady_state_error: float  # mm, worst error after the transient window
    characteristic_length: float
    transient_fraction: float

    def percent(self, value: float) -> float:
        return 100.0 * value / self.characteristic_length

    @property
    def steady_state_percent(self) -> float:
        return self.percent(self.steady_state_error)

    def as_dict(self) -> dict:
        return {
            "mean_error_mm": self.mean_error,
            "max_error_mm": self.max_error,
            "steady_state_error_mm": self.steady_state_error,
            "mean_error_pct": self.percent(self.mean_error),
            "max_error_pct": self.percent(self.max_error),
            "steady_state_error_pct": self.steady_state_percent,
            "characteristic_length_mm": self.characteristic_length,
            "transient_fraction": self.transient_fraction,
        }


def tracking_error_metrics(trace: TrackingTrace, reference: Trajectory, robot: RobotSpec,
                           transient_fraction: float = 0.1,
                           characteristic_length: float | None = None) -> TrackingMetrics:
    """Task-space error between the simulated tip and the held reference target.

    Percentages are relative to the reference's characteristic radius unless
    ``characteristic_length`` is given.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    if not 0.0 <= transient_fraction < 0.5:
        raise ValueError("transient_fraction must lie in [0, 0.5)")
    scale = characteristic_length or reference.characteristic_radius
    if not scale or scale <= 0:
        raise ValueError("need a positive characteristic length")
    err = np.empty(len(trace))
    for i, (t, tip) in enumerate(zip(trace.t, trace.tip)):
        target = reference.points[_hold_index(reference.times, t)]
        err[i] = np.linalg.norm(task_coordinates(robot, tip) - target)
    t0, t1 = trace.t[0], trace.t[-1]
    steady = trace.t >= t0 + transient_fraction * (t1 - t0) - 1e-12
    return TrackingMetrics(float(err.mean()), float(err.max()), float(err[steady].max()),
                           float(scale), transient_fraction)


__all__ = [
    "Gains", "SimulationSettings", "TrackingTrace", "TrackingMetrics",
    "control_law", "simulate_tracking", "tracking_error_metrics",
]

"""Warm-started inverse kinematics over the rigid-link PCC model.

Each target is solved by minimizing the squared tip error over the segment
variables (dL, theta, phi) with box bounds on dL and theta. Deflection angles
are periodic, so the optimizer leaves them unbounded and the result is wrapped
into (-pi, pi]. In 3D a bend (-theta, phi) is the same arc as (theta, phi + pi);
when theta's lower bound is zero the optimizer is allowed to pass through
negative theta and the answer is mapped back, which keeps straight segments
from getting pinned on the theta = 0 bound. An optional tip-angle task for
planar robots is layered on top with position-first priority.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ConfigVector,
    RobotSpec,
    chain,
    embed_target,
    tip_jacobian,
    tip_position,
    workspace_extent,
)
from .optimize import (
    CONVERGED,
    MAX_ITER,
    NUMERICAL_FAILURE,
    MinimizeSettings,
    constrained_minimize,
    finite_difference_gradient,
)

INFEASIBLE_SECONDARY = "infeasible_secondary"
DEGENERATE_THETA = 1e-6
SADDLE_NUDGE = 0.05  # rad, restart bend used to leave the all-straight saddle


@dataclass(frozen=True)
class IkSettings:
    position_tolerance: float = 1e-6  # mm
    gradient_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    max_iterations: int = 200
    secondary_weight: float = 1e3
    finite_difference_step: float = 1e-7
    gradient: str = "analytic"  # or "fd"
    compensated: bool = True

    def __post_init__(self):
        for name in ("position_tolerance", "gradient_tolerance", "step_tolerance",
                     "secondary_weight", "finite_difference_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.gradient not in ("analytic", "fd"):
            raise ValueError("gradient must be 'analytic' or 'fd'")

    def minimize_settings(self) -> MinimizeSettings:
        return MinimizeSettings(
            gradient_tolerance=self.gradient_tolerance,
            step_tolerance=self.step_tolerance,
            max_iterations=self.max_iterations,
            objective_target=self.position_tolerance ** 2,
            penalty_weight=self.secondary_weight,
            finite_difference_step=self.finite_difference_step,
        )


@dataclass(frozen=True)
class SecondaryTask:
    kind: str = "none"
    theta_d: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "tip_angle"):
            raise ValueError(f"unknown secondary task {self.kind!r}")

    @classmethod
    def tip_angle(cls, theta_d: float) -> "SecondaryTask":
        return cls("tip_angle", float(theta_d))


NO_TASK = SecondaryTask()


@dataclass
class IkResult:
    config: ConfigVector
    residual: float
    secondary_residual: float | None
    iterations: int
    status: str
    solve_time: float
    achieved: np.ndarray = field(default_factory=lambda: np.zeros(3))
    objective: float = 0.0
    warm_objective: float = 0.0


def tip_angle_residual(config: ConfigVector, theta_d: float, robot: RobotSpec | None = None) -> float:
    """Signed ``theta_d - sum(theta_i)``; only meaningful for planar arms."""
    if robot is not None and not robot.planar:
        raise ValueError("tip-angle residual is defined for planar robots only")
    if robot is None and any(s.phi != 0.0 for s in config):
        raise ValueError("tip-angle residual needs a planar config (all phi = 0)")
    return float(theta_d - sum(s.theta for s in config))


class _Problem:
    """Packs configs into optimizer vectors and evaluates the tip objective."""

    def __init__(self, robot: RobotSpec, target, settings: IkSettings):
        self.robot = robot
        self.settings = settings
        self.target = embed_target(robot, target)
        self.planar = robot.planar
        self.per = 2 if self.planar else 3
        lo, hi = [], []
        self.mirrored = []
        for seg in robot.segments:
            th_lo, th_hi = seg.theta_bounds
            mirror = not self.planar and th_lo == 0.0
            self.mirrored.append(mirror)
            lo += [seg.delta_l_bounds[0], -th_hi if mirror else th_lo]
            hi += [seg.delta_l_bounds[1], th_hi]
            if not self.planar:
                lo.append(-np.inf)
                hi.append(np.inf)
        self.lower = np.array(lo)
        self.upper = np.array(hi)
        self.theta_index = np.arange(robot.n_segments) * self.per + 1

    def unpack(self, x) -> np.ndarray:
        cfg = np.zeros((self.robot.n_segments, 3))
        cfg[:, : self.per] = np.asarray(x).reshape(-1, self.per)
        return cfg

    def pack(self, cfg) -> np.ndarray:
        return np.asarray(cfg, dtype=float)[:, : self.per].ravel().copy()

    def columns(self, J):
        if self.planar:
            keep = np.ravel([[3 * i, 3 * i + 1] for i in range(self.robot.n_segments)])
            return J[np.ix_([0, 2], keep)]
        return J

    def error(self, x):
        return tip_position(self.robot, self.unpack(x), self.settings.compensated) - self.target

    def objective(self, x) -> float:
        e = self.error(x)
        return float(e @ e)

    def gradient(self, x) -> np.ndarray:
        if self.settings.gradient == "fd":
            return finite_difference_gradient(self.objective, x, self.settings.finite_difference_step)
        p, J = tip_jacobian(self.robot, self.unpack(x), self.settings.compensated)
        e = p - self.target
        if self.planar:
            e = e[[0, 2]]
        return 2.0 * self.columns(J).T @ e

    def gauss_newton(self, x, extra=None) -> np.ndarray:
        """Regularized Gauss-Newton Hessian, used to seed BFGS."""
        _, J = tip_jacobian(self.robot, self.unpack(x), self.settings.compensated)
        J = self.columns(J)
        A = 2.0 * J.T @ J
        if extra is not None:
            A = A + extra
        mu = 1e-8 * max(float(np.trace(A)), 1.0)
        return A + mu * np.eye(A.shape[0])

    def seed_degenerate_phi(self, x) -> np.ndarray:
        """Point unidentifiable deflection angles at the target.

        With theta = 0 the tip does not depend on phi, so the gradient in phi
        vanishes. Aim each straight segment's bending plane at the target as
        seen from that segment's base.
        """
        if self.planar:
            return x
        cfg = self.unpack(x)
        straight = np.abs(cfg[:, 1]) < DEGENERATE_THETA
        if not straight.any():
            return x
        ch = chain(self.robot, cfg, self.settings.compensated)
        for i in np.flatnonzero(straight):
            base = ch.joints[0, ch.starts[i]]
            d = ch.frames[0, i].T @ (self.target - base)
            if math.hypot(d[0], d[1]) > 1e-12:
                cfg[i, 2] = math.atan2(d[1], d[0])
        return self.pack(cfg)


def _wrap(phi):
    """Map angles into (-pi, pi]."""
    w = np.mod(np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def _finish_config(problem: _Problem, x) -> ConfigVector:
    cfg = problem.unpack(np.clip(x, problem.lower, problem.upper))
    if not problem.planar:
        flip = np.array(problem.mirrored) & (cfg[:, 1] < 0)
        cfg[flip, 1] = -cfg[flip, 1]
        cfg[flip, 2] += np.pi
        cfg[:, 2] = _wrap(cfg[:, 2])
    return ConfigVector.from_array(cfg)


def solve_point(robot: RobotSpec, target, warm_start: ConfigVector | None = None,
                task: SecondaryTask = NO_TASK, settings: IkSettings | None = None) -> IkResult:
    """Solve one target, warm-started from ``warm_start``.

    Stage 1 minimizes position error alone. With a tip-angle task, stage 2
    re-solves with the angle residual as a weighted penalty; its answer is
    kept only if the position error still meets ``position_tolerance``.
    """
    settings = settings or IkSettings()
    t0 = time.perf_counter()
    if not np.all(np.isfinite(np.asarray(target, dtype=float))):
        raise ValueError("target must be finite")
    if task.kind == "tip_angle" and not robot.planar:
        raise ValueError("tip-angle task is only defined for planar robots")
    if warm_start is None:
        warm_start = ConfigVector.zeros(robot)
    if len(warm_start) != robot.n_segments:
        raise ValueError("warm start does not match robot")

    prob = _Problem(robot, target, settings)
    x0 = np.clip(prob.pack(warm_start.as_array()), prob.lower, prob.upper)
    x0 = prob.seed_degenerate_phi(x0)
    warm_obj = prob.objective(x0)
    mset = settings.minimize_settings()
    tol = settings.position_tolerance

    stage1 = constrained_minimize(
        prob.objective, x0, (prob.lower, prob.upper), grad=prob.gradient,
        settings=mset, hess0=prob.gauss_newton(x0),
    )
    iterations = stage1.nit
    if stage1.fun > tol ** 2 and np.all(np.abs(stage1.x[prob.theta_index]) < DEGENERATE_THETA):
        # An all-straight arm is a stationary point for targets on its axis:
        # every bending gradient vanishes by symmetry. Restart from small bends.
        for sign in (1.0, -1.0):
            xs = stage1.x.copy()
            xs[prob.theta_index] = sign * SADDLE_NUDGE
            xs = prob.seed_degenerate_phi(np.clip(xs, prob.lower, prob.upper))
            retry = constrained_minimize(
                prob.objective, xs, (prob.lower, prob.upper), grad=prob.gradient,
                settings=mset, hess0=prob.gauss_newton(xs),
            )
            iterations += retry.nit
            if retry.status != NUMERICAL_FAILURE and retry.fun < stage1.fun:
                stage1 = retry
            if stage1.fun <= tol ** 2:
                break
    chosen = stage1
    status = stage1.status
    secondary = None

    if task.kind == "tip_angle":
        a = np.zeros(prob.lower.size)
        a[prob.theta_index] = -1.0
        w = settings.secondary_weight

        def h(x):
            return np.array([task.theta_d - x[prob.theta_index].sum()])

        penalty_hess = 2.0 * w * np.outer(a, a)
        accepted = None
        for start in (x0, stage1.x):
            stage2 = constrained_minimize(
                prob.objective, start, (prob.lower, prob.upper), grad=prob.gradient,
                equality=h, equality_jac=lambda x: a[None, :], settings=mset,
                hess0=prob.gauss_newton(start, penalty_hess),
            )
            iterations += stage2.nit
            if stage2.status != NUMERICAL_FAILURE and math.sqrt(prob.objective(stage2.x)) <= tol:
                accepted = stage2
                break
        if accepted is not None:
            chosen = accepted
            status = accepted.status
        else:
            status = INFEASIBLE_SECONDARY

    config = _finish_config(prob, chosen.x)
    err = prob.error(prob.pack(config.as_array()))
    objective = float(err @ err)
    residual = math.sqrt(objective)
    if task.kind == "tip_angle":
        secondary = abs(tip_angle_residual(config, task.theta_d, robot))
    if status != NUMERICAL_FAILURE and status != INFEASIBLE_SECONDARY:
        status = CONVERGED if residual <= tol else MAX_ITER
    elif status == INFEASIBLE_SECONDARY and residual > tol:
        status = MAX_ITER
    return IkResult(
        config=config,
        residual=residual,
        secondary_residual=secondary,
        iterations=iterations,
        status=status,
        solve_time=time.perf_counter() - t0,
        achieved=err + prob.target,
        objective=objective,
        warm_objective=warm_obj,
    )


def solve_trajectory(robot: RobotSpec, targets, task: SecondaryTask = NO_TASK,
                     settings: IkSettings | None = None,
                     initial: ConfigVector | None = None) -> list[IkResult]:
    """Solve targets in order, warm-starting each from the previous answer.

    ``targets`` may be a :class:`~pccik.trajectory.Trajectory` or an array of
    task-space points. Never aborts: each point carries its own status.
    """
    points = getattr(targets, "points", targets)
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("trajectory must contain at least one point")
    warm = initial or ConfigVector.zeros(robot)
    results = []
    for p in points:
        res = solve_point(robot, p, warm, task, settings)
        results.append(res)
        if res.status != NUMERICAL_FAILURE:
            warm = res.config
    return results


def bending_coordinates(robot: RobotSpec, config) -> np.ndarray:
    """Per-segment ``(dL, L theta cos phi, L theta sin phi)``, flattened.

    Unlike raw (theta, phi) these vary continuously through straight poses
    and through the (theta, phi) ~ (-theta, phi + pi) identification, so
    distances between them measure real changes of shape. Planar arms use
    ``(dL, L theta)``.
    """
    cfg = np.asarray(getattr(config, "as_array", lambda: config)(), dtype=float)
    lt = robot.rest_lengths * cfg[:, 1]
    if robot.planar:
        return np.column_stack([cfg[:, 0], lt]).ravel()
    return np.column_stack([cfg[:, 0], lt * np.cos(cfg[:, 2]), lt * np.sin(cfg[:, 2])]).ravel()


def config_steps(robot: RobotSpec, configs) -> np.ndarray:
    """Norms of the changes between consecutive configs, in bending coordinates."""
    v = np.array([bending_coordinates(robot, c) for c in configs])
    if len(v) < 2:
        return np.zeros(0)
    return np.linalg.norm(np.diff(v, axis=0), axis=1)


def smoothness_ratio(robot: RobotSpec, configs) -> float:
    """Largest consecutive config step divided by the median step."""
    steps = config_steps(robot, configs)
    if steps.size == 0 or steps.max() == 0.0:
        return 1.0
    med = float(np.median(steps))
    return float(steps.max() / med) if med > 0 else math.inf


def shortfall_residual(robot: RobotSpec, target) -> float:
    """Distance by which a target lies beyond the straight reach."""
    return max(0.0, float(np.linalg.norm(embed_target(robot, target))) - workspace_extent(robot))


__all__ = [
    "CONVERGED", "MAX_ITER", "NUMERICAL_FAILURE", "INFEASIBLE_SECONDARY",
    "IkSettings", "SecondaryTask", "IkResult", "NO_TASK",
    "solve_point", "solve_trajectory", "tip_angle_residual", "shortfall_residual",
    "bending_coordinates", "config_steps", "smoothness_ratio",
]

"""Lagrangian dynamics of a PCC arm in strain/curvature coordinates.

Each segment is described by ``q = [eps, kx, ky]`` (planar: ``[eps, k]``), the
axial strain and the curvature vector. Inertia and gravity come from lumped
masses at the midpoints of the rigid links of the compensated chain, with
position Jacobians taken by central differences. The elastic potential uses
tanh-saturating elongation and bending stiffness integrated by Gauss-Legendre
quadrature. Units are mm, g and s throughout, so forces are in g mm / s^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ConfigVector,
    RobotSpec,
    _drift_ratio_array,
    segment_rotation,
)

MASS_REGULARIZATION = 1e-9
JACOBIAN_STEP = 1e-5
CURVATURE_STEP = 1e-4
HESSIAN_STEP = 1e-4

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class IntegrationError(RuntimeError):
    """Raised when the integrator meets a non-finite or invalid state."""

    def __init__(self, message: str, state: "DynState", tick: int | None = None):
        super().__init__(message)
        self.state = state
        self.tick = tick


@dataclass(frozen=True)
class StiffnessParams:
    """Coefficients of the elongation and bending stiffness laws.

    These defaults are placeholders in mm/g/s units, not identified values.
    """

    a1: float = 1.0
    a2: float = 0.5
    a3: float = 5.0
    a4: float = 1.0
    a5: float = 0.5
    a6: float = 5.0
    lobes: int = 3

    def __post_init__(self):
        if not self.a1 > 0 or not self.a4 > 0:
            raise ValueError("a1 and a4 must be positive")
        if self.lobes < 1:
            raise ValueError("lobes must be >= 1")

    def elongation(self, s):
        return self.a1 + self.a2 * (np.tanh(self.a3 * s) ** 2 - 1.0)

    def bending(self, s):
        """Bending stiffness before the deflection-dependent factor."""
        return self.a4 + self.a5 * (np.tanh(self.a6 * s) ** 2 - 1.0)


@dataclass(frozen=True)
class DampingParams:
    """Rayleigh damping ``D = (R + mass_proportional * M(q)) qdot``.

    ``r`` is the diagonal of R. The mass-proportional rate (1/s) is off by
    default; it damps every mode at the same rate regardless of coordinate
    scaling.
    """

    r: float | tuple = 0.1  # scalar or per-coordinate diagonal
    mass_proportional: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.r, dtype=float) < 0):
            raise ValueError("damping coefficients must be non-negative")
        if self.mass_proportional < 0:
            raise ValueError("mass_proportional must be non-negative")

    def matrix(self, size: int) -> np.ndarray:
        r = np.asarray(self.r, dtype=float)
        if r.ndim == 0:
            return float(r) * np.eye(size)
        if r.shape != (size,):
            raise ValueError(f"expected {size} damping coefficients, got {r.size}")
        return np.diag(r)


@dataclass(frozen=True)
class ActuationParams:
    h1: float = 8e-4
    h2: float = 7.91e-7
    bellows: int = 3
    p_max: float = 100.0  # kPa
    erratum_fix: bool = True

    def __post_init__(self):
        if not self.h1 > 0 or not self.h2 > 0:
            raise ValueError("h1 and h2 must be positive")
        if self.bellows < 3:
            raise ValueError("need at least 3 bellows")
        if not self.p_max > 0:
            raise ValueError("p_max must be positive")


@dataclass(frozen=True)
class DynamicsParams:
    stiffness: StiffnessParams = field(default_factory=StiffnessParams)
    damping: DampingParams = field(default_factory=DampingParams)
    actuation: ActuationParams = field(default_factory=ActuationParams)


@dataclass(frozen=True)
class DynState:
    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        qd = np.array(self.qdot, dtype=float)
        if q.ndim != 1 or q.shape != qd.shape:
            raise ValueError("q and qdot must be 1-D arrays of equal length")
        q.flags.writeable = False
        qd.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qd)

    @classmethod
    def zeros(cls, robot: RobotSpec) -> "DynState":
        n = state_size(robot)
        return cls(np.zeros(n), np.zeros(n))


# ---------------------------------------------------------------- state maps

def coordinates_per_segment(robot: RobotSpec) -> int:
    return 2 if robot.planar else 3


def state_size(robot: RobotSpec) -> int:
    return coordinates_per_segment(robot) * robot.n_segments


def _check_size(robot: RobotSpec, v, name="q") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != state_size(robot):
        raise ValueError(f"{name} has length {v.shape[-1]}, robot needs {state_size(robot)}")
    return v


def state_from_config(config: ConfigVector, robot: RobotSpec) -> np.ndarray:
    """Map (dL, theta, phi) per segment to (eps, kx, ky), or (eps, k) if planar."""
    cfg = config.as_array() if isinstance(config, ConfigVector) else np.asarray(config, dtype=float)
    if cfg.shape != (robot.n_segments, 3):
        raise ValueError("config does not match robot")
    l0 = robot.rest_lengths
    length = l0 + cfg[:, 0]
    if np.any(length <= 0):
        raise ValueError("segment length must stay positive (eps > -1)")
    eps = cfg[:, 0] / l0
    if robot.planar:
        return np.column_stack([eps, cfg[:, 1] / length]).ravel()
    kappa = cfg[:, 1] / length
    return np.column_stack([eps, np.cos(cfg[:, 2]) * kappa, np.sin(cfg[:, 2]) * kappa]).ravel()


def _configs_from_states(robot: RobotSpec, Q: np.ndarray) -> np.ndarray:
    """Batched inverse map: (B, nq) states to (B, n_segments, 3) configs."""
    per = coordinates_per_segment(robot)
    Q = Q.reshape(Q.shape[0], robot.n_segments, per)
    eps = Q[:, :, 0]
    if np.any(eps <= -1.0):
        raise ValueError("strain must stay above -1")
    l0 = robot.rest_lengths
    length = l0 * (1.0 + eps)
    cfg = np.zeros(Q.shape[:2] + (3,))
    cfg[:, :, 0] = l0 * eps
    if per == 2:
        cfg[:, :, 1] = length * Q[:, :, 1]
    else:
        cfg[:, :, 1] = length * np.hypot(Q[:, :, 1], Q[:, :, 2])
        cfg[:, :, 2] = np.arctan2(Q[:, :, 2], Q[:, :, 1])
    return cfg


def config_from_state(q, robot: RobotSpec) -> ConfigVector:
    q = _check_size(robot, q)
    return ConfigVector.from_array(_configs_from_states(robot, q[None])[0])


# ------------------------------------------------------------ lumped masses

def _mass_points(robot: RobotSpec, cfg: np.ndarray) -> np.ndarray:
    """Midpoints of every rigid link for a batch of configs, shape (B, N, 3).

    Same geometry as :func:`pccik.geometry.chain` with compensation on, but
    vectorized over the links of a segment.
    """
    if robot.planar and len({s.links for s in robot.segments}) == 1:
        return _planar_mass_points(robot, cfg)
    B = cfg.shape[0]
    base = np.zeros((B, 3))
    F = np.broadcast_to(np.eye(3), (B, 3, 3)).copy()
    out = []
    for i, seg in enumerate(robot.segments):
        n = seg.links
        dl, th, ph = cfg[:, i, 0], cfg[:, i, 1], cfg[:, i, 2]
        ell = (seg.rest_length + dl) / (n * _drift_ratio_array(th, n))
        a = np.outer(th, (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n))
        ca = ell[:, None] * np.cos(a)
        sa = ell[:, None] * np.sin(a)
        ct = np.cumsum(ca, axis=1)
        cb = np.cumsum(sa, axis=1)
        tangent = F[:, :, 2]
        bend = np.cos(ph)[:, None] * F[:, :, 0] + np.sin(ph)[:, None] * F[:, :, 1]
        mt = ct - 0.5 * ca
        mb = cb - 0.5 * sa
        out.append(base[:, None, :] + mt[:, :, None] * tangent[:, None, :]
                   + mb[:, :, None] * bend[:, None, :])
        base = base + ct[:, -1:] * tangent + cb[:, -1:] * bend
        F = F @ segment_rotation(th, ph)
    return np.concatenate(out, axis=1)


def _planar_mass_points(robot: RobotSpec, cfg: np.ndarray) -> np.ndarray:
    """Closed form for planar arms: every link angle is a running sum of bends."""
    n = robot.segments[0].links
    th = cfg[:, :, 1]
    ell = (robot.rest_lengths + cfg[:, :, 0]) / (n * _drift_ratio_array(th, n))
    w = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    base = np.cumsum(th, axis=1) - th
    angle = (base[:, :, None] + th[:, :, None] * w).reshape(th.shape[0], -1)
    length = np.repeat(ell, n, axis=1)
    dx = length * np.sin(angle)
    dz = length * np.cos(angle)
    out = np.zeros(angle.shape + (3,))
    out[:, :, 0] = np.cumsum(dx, axis=1) - 0.5 * dx
    out[:, :, 2] = np.cumsum(dz, axis=1) - 0.5 * dz
    return out


def lumped_masses(robot: RobotSpec) -> np.ndarray:
    return np.concatenate([np.full(seg.links, m / seg.links)
                           for seg, m in zip(robot.segments, robot.masses)])


def _coordinate_steps(robot: RobotSpec, h: float) -> np.ndarray:
    """Per-coordinate step: ``h`` for strain, ``h / l0`` for curvature."""
    per = coordinates_per_segment(robot)
    steps = np.repeat(h / robot.rest_lengths, per).reshape(-1, per)
    steps[:, 0] = h
    return steps.ravel()


def _kinematics(robot: RobotSpec, q, qdot=None):
    """Mass-point positions, Jacobians (N, 3, nq) and, if qdot is given, Jdot qdot."""
    q = _check_size(robot, q)
    nq = q.size
    steps = _coordinate_steps(robot, JACOBIAN_STEP)
    rows = [q]
    for k in range(nq):
        e = np.zeros(nq)
        e[k] = steps[k]
        rows += [q + e, q - e]
    t = 0.0
    if qdot is not None:
        scaled = float(np.linalg.norm(qdot / _coordinate_steps(robot, 1.0)))
        if scaled > 0:
            t = CURVATURE_STEP / scaled
            rows += [q + t * qdot, q - t * qdot]
    P = _mass_points(robot, _configs_from_states(robot, np.array(rows)))
    p0 = P[0]
    J = np.stack([(P[1 + 2 * k] - P[2 + 2 * k]) / (2.0 * steps[k]) for k in range(nq)], axis=-1)
    bias = None
    if qdot is not None:
        bias = np.zeros_like(p0) if t == 0.0 else (P[-2] - 2.0 * p0 + P[-1]) / (t * t)
    return p0, J, bias


def mass_matrix(robot: RobotSpec, q) -> np.ndarray:
    _, J, _ = _kinematics(robot, q)
    return _mass_from_jacobian(robot, J)


def _mass_from_jacobian(robot: RobotSpec, J) -> np.ndarray:
    m = lumped_masses(robot)
    M = np.einsum("k,kai,kaj->ij", m, J, J)
    M = 0.5 * (M + M.T)
    return M + MASS_REGULARIZATION * np.eye(M.shape[0])


def gravitational_potential(robot: RobotSpec, q) -> float:
    q = _check_size(robot, q)
    P = _mass_points(robot, _configs_from_states(robot, q[None]))[0]
    return float(-lumped_masses(robot) @ (P @ np.asarray(robot.gravity, dtype=float)))


def gravity_vector(robot: RobotSpec, q) -> np.ndarray:
    """Gradient of the gravitational potential."""
    _, J, _ = _kinematics(robot, q)
    return _gravity_from_jacobian(robot, J)


def _gravity_from_jacobian(robot: RobotSpec, J) -> np.ndarray:
    g = np.asarray(robot.gravity, dtype=float)
    return -np.einsum("k,kai,a->i", lumped_masses(robot), J, g)


def coriolis_force(robot: RobotSpec, q, qdot) -> np.ndarray:
    """Coriolis and centrifugal force ``C(q, qdot) qdot`` without forming C."""
    _, J, bias = _kinematics(robot, q, _check_size(robot, qdot, "qdot"))
    return np.einsum("k,kai,ka->i", lumped_masses(robot), J, bias)


def mass_matrix_derivatives(robot: RobotSpec, q) -> np.ndarray:
    """``dM[k] = dM/dq_k`` by central differences, shape (nq, nq, nq)."""
    q = _check_size(robot, q)
    steps = _coordinate_steps(robot, HESSIAN_STEP)
    out = []
    for k in range(q.size):
        e = np.zeros(q.size)
        e[k] = steps[k]
        out.append((mass_matrix(robot, q + e) - mass_matrix(robot, q - e)) / (2.0 * steps[k]))
    return np.array(out)


def coriolis_matrix(robot: RobotSpec, q, qdot) -> np.ndarray:
    """C from the Christoffel symbols of M, so that Mdot - 2C is skew."""
    qdot = _check_size(robot, qdot, "qdot")
    dM = mass_matrix_derivatives(robot, q)
    # c_ijk = (dM_ij/dq_k + dM_ik/dq_j - dM_jk/dq_i) / 2
    a = np.einsum("kij,k->ij", dM, qdot)
    b = np.einsum("jik,k->ij", dM, qdot)
    c = np.einsum("ijk,k->ij", dM, qdot)
    return 0.5 * (a + b - c)


# ------------------------------------------------------------------ elastic

def _moment_integral(fn, upper):
    """Integral of ``fn(s) * s`` from 0 to ``upper`` by 16-node Gauss-Legendre.

    ``upper`` may be an array; one integral is returned per entry.
    """
    upper = np.asarray(upper, dtype=float)
    s = 0.5 * upper[..., None] * (_GL_NODES + 1.0)
    return 0.5 * upper * ((fn(s) * s) @ _GL_WEIGHTS)


def _elastic(q, params: StiffnessParams, robot: RobotSpec):
    """Energy and gradient, vectorized over segments."""
    q = _check_size(robot, q)
    per = coordinates_per_segment(robot)
    Q = q.reshape(robot.n_segments, per)
    eps = Q[:, 0]
    if np.any(eps <= -1.0):
        raise ValueError("strain must stay above -1")
    l0 = robot.rest_lengths
    length = l0 * (1.0 + eps)
    m = params.lobes
    if per == 2:
        kappa = Q[:, 1]
        phi = np.zeros_like(kappa)
    else:
        kappa = np.hypot(Q[:, 1], Q[:, 2])
        phi = np.arctan2(Q[:, 2], Q[:, 1])
    beta = length * kappa
    shape = np.sin(m * phi) + 1.0
    alpha = 0.5 * np.abs(beta) * shape + 1.0
    fe = _moment_integral(params.elongation, eps)
    fb = _moment_integral(params.bending, beta)
    energy = float(np.sum(fe + alpha * fb))

    dU_dbeta = 0.5 * np.sign(beta) * shape * fb + alpha * params.bending(beta) * beta
    grad = np.zeros_like(Q)
    grad[:, 0] = params.elongation(eps) * eps + dU_dbeta * l0 * kappa
    if per == 2:
        grad[:, 1] = dU_dbeta * length
    else:
        bent = kappa > 0.0
        safe = np.where(bent, kappa, 1.0)
        dU_dphi = 0.5 * np.abs(beta) * m * np.cos(m * phi) * fb
        grad[:, 1] = np.where(bent, dU_dbeta * length * Q[:, 1] / safe - dU_dphi * Q[:, 2] / safe ** 2, 0.0)
        grad[:, 2] = np.where(bent, dU_dbeta * length * Q[:, 2] / safe + dU_dphi * Q[:, 1] / safe ** 2, 0.0)
    return energy, grad.ravel()


def elastic_potential(q, params: StiffnessParams, robot: RobotSpec) -> float:
    """Hyper-elastic energy; the bending angle plays the role of beta."""
    return _elastic(q, params, robot)[0]


def stiffness_vector(q, params: StiffnessParams, robot: RobotSpec) -> np.ndarray:
    """K(q), the gradient of :func:`elastic_potential`."""
    return _elastic(q, params, robot)[1]


def damping_vector(params: DampingParams, qdot, mass=None) -> np.ndarray:
    """``D(qdot)``; ``mass`` is M(q), needed only for mass-proportional damping."""
    qdot = np.asarray(qdot, dtype=float)
    out = params.matrix(qdot.size) @ qdot
    if params.mass_proportional:
        if mass is None:
            raise ValueError("mass-proportional damping needs the mass matrix")
        out = out + params.mass_proportional * (np.asarray(mass) @ qdot)
    return out


# ---------------------------------------------------------------- actuation

def input_mapping(params: ActuationParams) -> np.ndarray:
    """Per-segment map from bellows pressures to (eps, kx, ky) forces, 3 x m.

    The printed form repeats the cosine row with opposite sign, which makes
    it rank 2; ``erratum_fix`` puts the sine of the bellows angle in row 3.
    """
    gamma = np.arange(params.bellows) * 2.0 * np.pi / params.bellows
    third = np.sin(gamma) if params.erratum_fix else np.cos(gamma)
    return np.vstack([
        np.full(params.bellows, params.h1),
        -params.h2 * np.cos(gamma),
        params.h2 * third,
    ])


def robot_input_mapping(robot: RobotSpec, params: ActuationParams) -> np.ndarray:
    """Block-diagonal H for the whole arm; planar arms keep rows (eps, k)."""
    H = input_mapping(params)
    if robot.planar:
        H = H[:2]
    r, c = H.shape
    out = np.zeros((r * robot.n_segments, c * robot.n_segments))
    for i in range(robot.n_segments):
        out[i * r:(i + 1) * r, i * c:(i + 1) * c] = H
    return out


@dataclass
class PressureSolution:
    u: np.ndarray
    clamped: np.ndarray  # bool per bellows
    residual: float  # |H u - tau| after clamping
    range_residual: float  # |H u - tau| before clamping

    @property
    def clamp_events(self) -> int:
        return int(self.clamped.sum())


def pressures_from_tau(H, tau, limits=(0.0, 100.0)) -> PressureSolution:
    """Least-squares (minimum-norm) pressures for ``H u = tau``, then clamped."""
    H = np.asarray(H, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if H.shape[0] != tau.size:
        raise ValueError("tau does not match H")
    u, *_ = np.linalg.lstsq(H, tau, rcond=None)
    range_residual = float(np.linalg.norm(H @ u - tau))
    lo, hi = limits
    clipped = np.clip(u, lo, hi)
    return PressureSolution(clipped, clipped != u, float(np.linalg.norm(H @ clipped - tau)),
                            range_residual)


# -------------------------------------------------------------- integration

def acceleration(robot: RobotSpec, q, qdot, tau, params: DynamicsParams) -> np.ndarray:
    """Solve M qddot = tau - C qdot - G - K - D for qddot."""
    q = _check_size(robot, q)
    qdot = _check_size(robot, qdot, "qdot")
    _, J, bias = _kinematics(robot, q, qdot)
    M = _mass_from_jacobian(robot, J)
    rhs = (np.asarray(tau, dtype=float)
           - np.einsum("k,kai,ka->i", lumped_masses(robot), J, bias)
           - _gravity_from_jacobian(robot, J)
           - stiffness_vector(q, params.stiffness, robot)
           - damping_vector(params.damping, qdot, M))
    return np.linalg.solve(M, rhs)


def step_dynamics(robot: RobotSpec, state: DynState, tau, dt: float,
                  params: DynamicsParams | None = None) -> DynState:
    """One classical RK4 step with ``tau`` held constant."""
    if not 0.0 < dt <= 0.01:
        raise ValueError("dt must lie in (0, 0.01]")
    params = params or DynamicsParams()
    q0, v0 = state.q, state.qdot

    def f(q, v):
        try:
            a = acceleration(robot, q, v, tau, params)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise IntegrationError(f"dynamics evaluation failed: {exc}", state) from exc
        if not np.all(np.isfinite(a)):
            raise IntegrationError("non-finite acceleration", state)
        return a

    a1 = f(q0, v0)
    q1, v1 = q0 + 0.5 * dt * v0, v0 + 0.5 * dt * a1
    a2 = f(q1, v1)
    q2, v2 = q0 + 0.5 * dt * v1, v0 + 0.5 * dt * a2
    a3 = f(q2, v2)
    q3, v3 = q0 + dt * v2, v0 + dt * a3
    a4 = f(q3, v3)
    q = q0 + dt / 6.0 * (v0 + 2.0 * v1 + 2.0 * v2 + v3)
    v = v0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
        raise IntegrationError("non-finite state after step", state)
    return DynState(q, v)


def kinetic_energy(robot: RobotSpec, state: DynState) -> float:
    v = state.qdot
    return 0.5 * float(v @ mass_matrix(robot, state.q) @ v)


def total_energy(robot: RobotSpec, state: DynState, params: DynamicsParams | None = None) -> float:
    """Kinetic plus elastic plus gravitational energy."""
    params = params or DynamicsParams()
    return (kinetic_energy(robot, state)
            + elastic_potential(state.q, params.stiffness, robot)
            + gravitational_potential(robot, state.q))


__all__ = [
    "IntegrationError", "StiffnessParams", "DampingParams", "ActuationParams",
    "DynamicsParams", "DynState", "PressureSolution",
    "state_size", "coordinates_per_segment", "state_from_config", "config_from_state",
    "lumped_masses", "mass_matrix", "mass_matrix_derivatives", "coriolis_matrix",
    "coriolis_force", "gravity_vector", "gravitational_potential",
    "elastic_potential", "stiffness_vector", "damping_vector",
    "input_mapping", "robot_input_mapping", "pressures_from_tau",
    "acceleration", "step_dynamics", "kinetic_energy", "total_energy",
]

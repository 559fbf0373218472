"""Rigid-link forward kinematics for piecewise-constant-curvature arms.

Each segment is an arc of constant curvature discretized into ``n`` straight
links. Link ``j`` of a segment points at ``(2j - 1) * theta / (2n)`` from the
segment's base tangent, inside the bending plane selected by ``phi``. The
segment length ``L + dL`` is the arc length; with drift compensation on, each
link is shortened by :func:`drift_ratio` to the true chord so the chain tip
lands exactly on the arc endpoint. Without it the links sum to the arc length
and the tip overshoots the arc.

Units are millimetres and radians throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

SMALL_ANGLE = 1e-8
DEFAULT_REST_LENGTH = 64.4  # mm
DEFAULT_SEGMENT_MASS = 17.3  # g
DEFAULT_GRAVITY = (0.0, 0.0, -9810.0)  # mm/s^2


class DimensionError(ValueError):
    """Configuration or state does not match the robot."""


class UnreachableError(ValueError):
    """Target cannot be reached by any constant-curvature segment."""


class OutOfRangeError(ValueError):
    """Closed-form solution exists but violates the segment bounds."""

    def __init__(self, message: str, solution: "SegmentConfig"):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True)
class SegmentSpec:
    rest_length: float = DEFAULT_REST_LENGTH
    links: int = 6
    delta_l_bounds: tuple[float, float] | None = None
    theta_bounds: tuple[float, float] | None = None
    planar: bool = False

    def __post_init__(self):
        if self.links < 1:
            raise ValueError(f"links must be >= 1, got {self.links}")
        if not self.rest_length > 0:
            raise ValueError(f"rest_length must be positive, got {self.rest_length}")
        if self.delta_l_bounds is None:
            object.__setattr__(
                self, "delta_l_bounds", (-0.2 * self.rest_length, 0.5 * self.rest_length)
            )
        if self.theta_bounds is None:
            lo = -math.pi if self.planar else 0.0
            object.__setattr__(self, "theta_bounds", (lo, math.pi))
        dl_lo, dl_hi = (float(v) for v in self.delta_l_bounds)
        th_lo, th_hi = (float(v) for v in self.theta_bounds)
        object.__setattr__(self, "delta_l_bounds", (dl_lo, dl_hi))
        object.__setattr__(self, "theta_bounds", (th_lo, th_hi))
        if dl_lo <= -self.rest_length:
            raise ValueError("delta_l lower bound would allow non-positive segment length")
        if dl_lo > dl_hi:
            raise ValueError("delta_l bounds are reversed")
        if not (math.isfinite(th_lo) and math.isfinite(th_hi)) or th_lo > th_hi:
            raise ValueError("theta bounds must be finite and ordered")
        if th_hi > math.pi + 1e-12:
            raise ValueError("theta upper bound may not exceed pi")


@dataclass(frozen=True)
class RobotSpec:
    segments: tuple[SegmentSpec, ...]
    gravity: tuple[float, float, float] = DEFAULT_GRAVITY
    bellows: int = 3
    masses: tuple[float, ...] | None = None

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValueError("a robot needs at least one segment")
        if len({s.planar for s in segments}) != 1:
            raise ValueError("planar flag must be the same for every segment")
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "gravity", tuple(float(g) for g in self.gravity))
        if len(self.gravity) != 3:
            raise ValueError("gravity must be a 3-vector")
        masses = self.masses
        if masses is None:
            masses = (DEFAULT_SEGMENT_MASS,) * len(segments)
        masses = tuple(float(m) for m in masses)
        if len(masses) != len(segments) or min(masses) <= 0:
            raise ValueError("need one positive mass per segment")
        object.__setattr__(self, "masses", masses)
        if self.bellows < 1:
            raise ValueError("bellows must be positive")

    @classmethod
    def uniform(cls, n_segments: int, rest_length: float = DEFAULT_REST_LENGTH,
                links: int = 6, planar: bool = False, **kwargs) -> "RobotSpec":
        seg = SegmentSpec(rest_length=rest_length, links=links, planar=planar)
        return cls(segments=(seg,) * n_segments, **kwargs)

    @property
    def planar(self) -> bool:
        return self.segments[0].planar

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def rest_lengths(self) -> np.ndarray:
        return np.array([s.rest_length for s in self.segments])

    def with_links(self, links: int) -> "RobotSpec":
        segs = tuple(
            SegmentSpec(s.rest_length, links, s.delta_l_bounds, s.theta_bounds, s.planar)
            for s in self.segments
        )
        return RobotSpec(segs, self.gravity, self.bellows, self.masses)

    def without_gravity(self) -> "RobotSpec":
        return RobotSpec(self.segments, (0.0, 0.0, 0.0), self.bellows, self.masses)


@dataclass(frozen=True)
class SegmentConfig:
    delta_l: float = 0.0
    theta: float = 0.0
    phi: float = 0.0


@dataclass(frozen=True)
class ConfigVector:
    per_segment: tuple[SegmentConfig, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "per_segment", tuple(self.per_segment))

    def __len__(self):
        return len(self.per_segment)

    def __iter__(self):
        return iter(self.per_segment)

    def __getitem__(self, i):
        return self.per_segment[i]

    @classmethod
    def zeros(cls, robot: RobotSpec) -> "ConfigVector":
        return cls((SegmentConfig(),) * robot.n_segments)

    @classmethod
    def from_array(cls, values) -> "ConfigVector":
        arr = np.asarray(values, dtype=float).reshape(-1, 3)
        return cls(tuple(SegmentConfig(float(a), float(b), float(c)) for a, b, c in arr))

    def as_array(self) -> np.ndarray:
        return np.array([[s.delta_l, s.theta, s.phi] for s in self.per_segment], dtype=float)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([s.theta for s in self.per_segment])


@dataclass(frozen=True)
class Pose3:
    position: np.ndarray
    frame: np.ndarray

    @property
    def x(self) -> float:
        return float(self.position[0])

    @property
    def y(self) -> float:
        return float(self.position[1])

    @property
    def z(self) -> float:
        return float(self.position[2])


def drift_ratio(theta: float, n: int) -> float:
    """Arc length divided by the summed chord length of ``n`` equal links.

    Equal to ``theta / (n * sqrt(2 - 2 cos(theta / n)))``; evaluated through
    the half-angle sine to avoid cancellation at small angles.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if abs(theta) < SMALL_ANGLE:
        return 1.0
    x = theta / (2.0 * n)
    return x / math.sin(x)


def _drift_ratio_array(theta: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(theta, dtype=float) / (2.0 * n)
    small = np.abs(theta) < SMALL_ANGLE
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0, safe / np.sin(safe))


def _drift_ratio_log_derivative(theta: float, n: int) -> float:
    """d(ln drift_ratio)/d(theta)."""
    x = theta / (2.0 * n)
    if abs(x) < 1e-3:
        # series of (1/x - cot x) / (2n)
        return (x / 3.0 + x**3 / 45.0) / (2.0 * n)
    return (1.0 / x - math.cos(x) / math.sin(x)) / (2.0 * n)


def segment_rotation(theta, phi) -> np.ndarray:
    """Tip frame of one segment relative to its base: Rz(phi) Ry(theta) Rz(-phi).

    Accepts scalars or equally shaped arrays; returns ``(..., 3, 3)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    v = 1.0 - c
    R = np.empty(np.broadcast(theta, phi).shape + (3, 3))
    R[..., 0, 0] = c + v * sp * sp
    R[..., 0, 1] = -v * sp * cp
    R[..., 0, 2] = s * cp
    R[..., 1, 0] = -v * sp * cp
    R[..., 1, 1] = c + v * cp * cp
    R[..., 1, 2] = s * sp
    R[..., 2, 0] = -s * cp
    R[..., 2, 1] = -s * sp
    R[..., 2, 2] = c
    return R


class Chain(NamedTuple):
    joints: np.ndarray   # (B, total_links + 1, 3), first row is the base
    frames: np.ndarray   # (B, n_segments + 1, 3, 3), frame at each segment boundary
    starts: tuple[int, ...]  # joint index of each segment base, plus the tip index


def chain(robot: RobotSpec, configs, compensated: bool = True,
          links: Sequence[int] | None = None) -> Chain:
    """Evaluate the rigid-link chain for a batch of configurations.

    ``configs`` has shape ``(B, n_segments, 3)`` (or ``(n_segments, 3)``) with
    columns ``delta_l, theta, phi``. Links are accumulated one at a time, so
    the cost grows with the link count just as the serial chain does.
    """
    cfg = np.asarray(configs, dtype=float)
    if cfg.ndim == 2:
        cfg = cfg[None]
    if cfg.ndim != 3 or cfg.shape[1:] != (robot.n_segments, 3):
        raise DimensionError(
            f"expected configs of shape (B, {robot.n_segments}, 3), got {np.shape(configs)}"
        )
    B = cfg.shape[0]
    p = np.zeros((B, 3))
    F = np.broadcast_to(np.eye(3), (B, 3, 3)).copy()
    joints = [p]
    frames = [F]
    starts = [0]
    for i, seg in enumerate(robot.segments):
        n = seg.links if links is None else int(links[i])
        dl, th, ph = cfg[:, i, 0], cfg[:, i, 1], cfg[:, i, 2]
        ell = (seg.rest_length + dl) / n
        if compensated:
            ell = ell / _drift_ratio_array(th, n)
        tangent = F[:, :, 2]
        bend = np.cos(ph)[:, None] * F[:, :, 0] + np.sin(ph)[:, None] * F[:, :, 1]
        for j in range(1, n + 1):
            a = (2 * j - 1) * th / (2 * n)
            step = np.cos(a)[:, None] * tangent + np.sin(a)[:, None] * bend
            p = p + ell[:, None] * step
            joints.append(p)
        F = F @ segment_rotation(th, ph)
        frames.append(F)
        starts.append(len(joints) - 1)
    return Chain(np.stack(joints, axis=1), np.stack(frames, axis=1), tuple(starts))


def _as_config_array(robot: RobotSpec, config) -> np.ndarray:
    arr = config.as_array() if isinstance(config, ConfigVector) else np.asarray(config, float)
    if arr.shape != (robot.n_segments, 3):
        raise DimensionError(
            f"config has shape {arr.shape}, robot needs ({robot.n_segments}, 3)"
        )
    return arr


def _serial_chain(robot: RobotSpec, cfg: np.ndarray, compensated: bool):
    """Scalar version of :func:`chain` for one configuration.

    Plain floats keep per-link overhead low for the optimizer's inner loop.
    Returns joint list, frame list (row-major 3x3 tuples) and segment starts.
    """
    px = py = pz = 0.0
    F = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
    joints = [(0.0, 0.0, 0.0)]
    frames = [F]
    starts = [0]
    cos, sin = math.cos, math.sin
    for i, seg in enumerate(robot.segments):
        n = seg.links
        dl, th, ph = float(cfg[i, 0]), float(cfg[i, 1]), float(cfg[i, 2])
        ell = (seg.rest_length + dl) / n
        if compensated:
            ell /= drift_ratio(th, n)
        cp, sp = cos(ph), sin(ph)
        tx, ty, tz = F[2], F[5], F[8]
        bx = cp * F[0] + sp * F[1]
        by = cp * F[3] + sp * F[4]
        bz = cp * F[6] + sp * F[7]
        for j in range(1, n + 1):
            a = (2 * j - 1) * th / (2 * n)
            ca, sa = cos(a) * ell, sin(a) * ell
            px += ca * tx + sa * bx
            py += ca * ty + sa * by
            pz += ca * tz + sa * bz
            joints.append((px, py, pz))
        c, s_ = cos(th), sin(th)
        v = 1.0 - c
        R = (c + v * sp * sp, -v * sp * cp, s_ * cp,
             -v * sp * cp, c + v * cp * cp, s_ * sp,
             -s_ * cp, -s_ * sp, c)
        F = tuple(
            F[3 * r] * R[k] + F[3 * r + 1] * R[3 + k] + F[3 * r + 2] * R[6 + k]
            for r in range(3) for k in range(3)
        )
        frames.append(F)
        starts.append(len(joints) - 1)
    return joints, frames, starts


def forward_kinematics(robot: RobotSpec, config, compensated: bool = True
                       ) -> tuple[Pose3, list[Pose3]]:
    """Tip pose and the pose at the end of every segment."""
    joints, frames, starts = _serial_chain(robot, _as_config_array(robot, config), compensated)
    ends = [Pose3(np.array(joints[k]), np.array(frames[i + 1]).reshape(3, 3))
            for i, k in enumerate(starts[1:])]
    return ends[-1], ends


def tip_position(robot: RobotSpec, config, compensated: bool = True) -> np.ndarray:
    joints, _, _ = _serial_chain(robot, _as_config_array(robot, config), compensated)
    return np.array(joints[-1])


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def tip_jacobian(robot: RobotSpec, config, compensated: bool = True
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Tip position and its ``3 x 3*n_segments`` Jacobian w.r.t. (dL, theta, phi).

    Every joint rotation inside a segment turns about the same axis, so the
    theta column is that axis crossed with a weighted lever-arm sum.
    """
    cfg = _as_config_array(robot, config)
    joints, frames, starts = _serial_chain(robot, cfg, compensated)
    tip = joints[-1]
    J = np.zeros((3, 3 * robot.n_segments))
    for i, seg in enumerate(robot.segments):
        dl, th, ph = cfg[i]
        a, b = starts[i], starts[i + 1]
        n = b - a
        base, end = joints[a], joints[b]
        F, F_end = frames[i], frames[i + 1]
        chord = [end[k] - base[k] for k in range(3)]
        length = seg.rest_length + dl
        J[:, 3 * i] = [c / length for c in chord]
        sp, cp = math.sin(ph), math.cos(ph)
        axis = (-sp * F[0] + cp * F[1], -sp * F[3] + cp * F[4], -sp * F[6] + cp * F[7])
        lever = [tip[k] - end[k] for k in range(3)]
        for j in range(1, n + 1):
            w = (2 * j - 1) / (2 * n)
            p0, p1 = joints[a + j - 1], joints[a + j]
            for k in range(3):
                lever[k] += w * (p1[k] - p0[k])
        col = list(_cross(axis, lever))
        if compensated:
            dlog = _drift_ratio_log_derivative(th, n)
            for k in range(3):
                col[k] -= dlog * chord[k]
        J[:, 3 * i + 1] = col
        arm0 = [tip[k] - base[k] for k in range(3)]
        arm1 = [tip[k] - end[k] for k in range(3)]
        c0 = _cross((F[2], F[5], F[8]), arm0)
        c1 = _cross((F_end[2], F_end[5], F_end[8]), arm1)
        J[:, 3 * i + 2] = [c0[k] - c1[k] for k in range(3)]
    return np.array(tip), J


def arc_endpoint(total_length: float, theta: float, phi: float) -> np.ndarray:
    """Closed-form tip of a single constant-curvature arc from the origin."""
    if abs(theta) < SMALL_ANGLE:
        # second-order series of (1 - cos t)/t and sin(t)/t
        r = total_length * (theta / 2.0)
        z = total_length * (1.0 - theta * theta / 6.0)
    else:
        r = total_length / theta * (1.0 - math.cos(theta))
        z = total_length / theta * math.sin(theta)
    return np.array([r * math.cos(phi), r * math.sin(phi), z])


def backbone_points(robot: RobotSpec, config, samples_per_segment: int) -> list[Pose3]:
    """Backbone poses from base to tip, ``samples_per_segment`` per segment.

    The compensated chain is re-evaluated with ``samples_per_segment`` links,
    so every returned point lies on the exact arc with uniform arc-length
    spacing inside each segment.
    """
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    cfg = _as_config_array(robot, config)
    k = samples_per_segment
    ch = chain(robot, cfg, True, links=[k] * robot.n_segments)
    joints = ch.joints[0]
    frames = ch.frames[0]
    poses = [Pose3(joints[0].copy(), frames[0].copy())]
    for i in range(robot.n_segments):
        _, th, ph = cfg[i]
        for j in range(1, k + 1):
            R = frames[i] @ segment_rotation(th * j / k, ph)
            poses.append(Pose3(joints[ch.starts[i] + j].copy(), R))
    return poses


def analytic_ik_single(target, spec: SegmentSpec) -> SegmentConfig:
    """Closed-form inverse of a single constant-curvature segment.

    For planar segments the target is ``(x, z)`` and theta carries the sign.
    """
    target = np.asarray(target, dtype=float)
    if spec.planar:
        if target.shape[-1] == 2:
            x, z = target
        else:
            x, z = target[0], target[2]
        y = 0.0
    else:
        x, y, z = target
    r = math.hypot(x, y)
    if r == 0.0 and z <= 0.0:
        raise UnreachableError(f"target {tuple(target)} lies on or behind the base")
    if spec.planar:
        theta = 2.0 * math.atan2(x, z)
        phi = 0.0
    else:
        theta = 2.0 * math.atan2(r, z)
        phi = math.atan2(y, x) if r > 0 else 0.0
    chord = math.hypot(r, z)
    half = abs(theta) / 2.0
    length = chord if half < SMALL_ANGLE else chord * half / math.sin(half)
    sol = SegmentConfig(length - spec.rest_length, theta, phi)
    lo, hi = spec.delta_l_bounds
    tlo, thi = spec.theta_bounds
    if not (lo <= sol.delta_l <= hi) or not (tlo <= sol.theta <= thi):
        raise OutOfRangeError(f"solution {sol} violates segment bounds", sol)
    return sol


def workspace_extent(robot: RobotSpec) -> float:
    """Maximum straight reach, the denominator for percentage errors."""
    return float(sum(s.rest_length + s.delta_l_bounds[1] for s in robot.segments))


def task_coordinates(robot: RobotSpec, position) -> np.ndarray:
    """Project a 3D point to the robot's task space.

    Planar robots bend in the x-z plane; their task space is ``(x, z)``.
    """
    position = np.asarray(position, dtype=float)
    return position[..., [0, 2]] if robot.planar else position


def embed_target(robot: RobotSpec, target) -> np.ndarray:
    """Inverse of :func:`task_coordinates` for a single target."""
    target = np.asarray(target, dtype=float)
    if robot.planar:
        if target.shape[-1] == 3:
            return np.array([target[0], 0.0, target[2]])
        return np.array([target[0], 0.0, target[1]])
    return target

"""Reference trajectories: parametric generators, resampling and CSV I/O."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SHAPES = ("circle2d", "circle3d", "flower")

_DEFAULTS = {
    "circle2d": {"cx": 175.0, "cy": 100.0, "radius": 50.0, "duration": 2 * math.pi},
    "circle3d": {"radius": 20.0, "omega": 6.0, "z": 60.0, "duration": None},
    "flower": {"c": 40.0, "a": 15.0, "z0": 60.0, "petals": 4, "duration": 2 * math.pi},
}


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    points: np.ndarray  # (N, 3), or (N, 2) for planar targets
    shape: str = "custom"
    params: dict = field(default_factory=dict)
    characteristic_radius: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] not in (2, 3):
            raise ValueError("points must have shape (N, 2) or (N, 3)")
        if len(t) != len(p):
            raise ValueError("times and points differ in length")
        if len(t) < 2:
            raise ValueError("a trajectory needs at least 2 points")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return len(self.times)

    @property
    def planar(self) -> bool:
        return self.points.shape[1] == 2

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


def generate(shape: str, n_points: int, duration: float | None = None, **params) -> Trajectory:
    """Sample one full period of a named shape at ``n_points`` (endpoints included).

    circle2d:  (cx + r cos s, cy + r sin s), planar targets.
    circle3d:  (r cos(w t), r sin(w t), z); one period is 2 pi / w seconds.
    flower:    radius c + a cos(k s) swept around z = z0, k petals.

    Timestamps run uniformly from 0 to ``duration``; the default makes the
    shape's own time variable equal to wall time.
    """
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    unknown = set(params) - set(_DEFAULTS[shape])
    if unknown:
        raise ValueError(f"unknown parameters for {shape}: {sorted(unknown)}")
    p = {k: v for k, v in _DEFAULTS[shape].items() if k != "duration"}
    p.update(params)
    s = np.linspace(0.0, 2.0 * math.pi, n_points)

    if shape == "circle2d":
        if p["radius"] <= 0:
            raise ValueError("radius must be positive")
        pts = np.column_stack([p["cx"] + p["radius"] * np.cos(s),
                               p["cy"] + p["radius"] * np.sin(s)])
        radius = p["radius"]
        natural = 2 * math.pi
    elif shape == "circle3d":
        if p["radius"] <= 0 or p["omega"] <= 0:
            raise ValueError("radius and omega must be positive")
        pts = np.column_stack([p["radius"] * np.cos(s), p["radius"] * np.sin(s),
                               np.full_like(s, p["z"])])
        radius = p["radius"]
        natural = 2 * math.pi / p["omega"]
    else:
        if p["c"] <= 0 or p["c"] - abs(p["a"]) <= 0:
            raise ValueError("flower radius c - |a| must be positive")
        rho = p["c"] + p["a"] * np.cos(p["petals"] * s)
        pts = np.column_stack([rho * np.cos(s), rho * np.sin(s), np.full_like(s, p["z0"])])
        radius = p["c"]
        natural = 2 * math.pi

    T = natural if duration is None else float(duration)
    if T <= 0:
        raise ValueError("duration must be positive")
    times = np.linspace(0.0, T, n_points)
    return Trajectory(times, pts, shape, dict(p, duration=T), radius)


def resample(traj: Trajectory, n_points: int) -> Trajectory:
    """Linear resampling at uniform arc length; endpoints are kept exactly."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    seg = np.linalg.norm(np.diff(traj.points, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] <= 0:
        raise ValueError("cannot resample a zero-length trajectory")
    su = np.linspace(0.0, s[-1], n_points)
    pts = np.column_stack([np.interp(su, s, traj.points[:, k])
                           for k in range(traj.points.shape[1])])
    times = np.interp(su, s, traj.times)
    pts[0], pts[-1] = traj.points[0], traj.points[-1]
    times[0], times[-1] = traj.times[0], traj.times[-1]
    return Trajectory(times, pts, traj.shape, dict(traj.params), traj.characteristic_radius)


def write_csv(traj: Trajectory, path) -> None:
    cols = ["t", "x", "y"] + ([] if traj.planar else ["z"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for t, p in zip(traj.times, traj.points):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in p])


def read_csv(path, planar: bool | None = None) -> Trajectory:
    """Read a ``t,x,y[,z]`` file. ``z`` is dropped when ``planar`` is true."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trajectory file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:3] != ["t", "x", "y"]:
        raise ValueError(f"{path}: header must start with t,x,y")
    has_z = "z" in header
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if len(body) < 2:
        raise ValueError(f"{path}: need at least 2 points")
    data = np.array([[float(c) for c in r[: 4 if has_z else 3]] for r in body])
    if planar is None:
        planar = not has_z
    pts = data[:, 1:3] if planar else data[:, 1:4]
    if not planar and not has_z:
        raise ValueError(f"{path}: 3D trajectory needs a z column")
    return Trajectory(data[:, 0], pts, "file", {"path": str(path)})

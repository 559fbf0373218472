"""Robot description files: INI sections for the arm, its segments and dynamics.

Layout::

    [robot]
    segments = 2
    planar = false
    gravity_mm_s2 = 0, 0, -9810
    bellows = 3

    [segment]            ; defaults shared by every segment
    rest_length_mm = 64.4
    links = 6
    mass_g = 17.3
    dl_min_mm = -12.88   ; optional, as are dl_max_mm, theta_min_rad, theta_max_rad

    [segment.2]          ; optional per-segment overrides, numbered from 1
    links = 8

    [stiffness]          ; a1..a6, lobes
    [damping]            ; r = scalar or one value per coordinate, mass_proportional
    [actuation]          ; h1, h2, p_max_kpa, erratum_fix

Built-in presets (``single``, ``two``, ``planar4``) can be used wherever a
file path is accepted.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .dynamics import ActuationParams, DampingParams, DynamicsParams, StiffnessParams
from .geometry import DEFAULT_GRAVITY, DEFAULT_SEGMENT_MASS, RobotSpec, SegmentSpec


class ConfigError(ValueError):
    """A robot file is missing, unreadable or inconsistent."""


@dataclass(frozen=True)
class RobotConfig:
    robot: RobotSpec
    dynamics: DynamicsParams = field(default_factory=DynamicsParams)
    name: str = "custom"


_SEGMENT_KEYS = ("rest_length_mm", "links", "mass_g", "dl_min_mm", "dl_max_mm",
                 "theta_min_rad", "theta_max_rad")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _segment(values: dict, planar: bool, where: str) -> tuple[SegmentSpec, float]:
    unknown = set(values) - set(_SEGMENT_KEYS)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    rest = float(values.get("rest_length_mm", 64.4))
    dl = None
    if "dl_min_mm" in values or "dl_max_mm" in values:
        dl = (float(values.get("dl_min_mm", -0.2 * rest)),
              float(values.get("dl_max_mm", 0.5 * rest)))
    th = None
    if "theta_min_rad" in values or "theta_max_rad" in values:
        th = (float(values.get("theta_min_rad", -np.pi if planar else 0.0)),
              float(values.get("theta_max_rad", np.pi)))
    spec = SegmentSpec(rest_length=rest, links=int(values.get("links", 6)),
                       delta_l_bounds=dl, theta_bounds=th, planar=planar)
    return spec, float(values.get("mass_g", DEFAULT_SEGMENT_MASS))


def _dataclass_from(section, cls, renames=None):
    renames = renames or {}
    names = {f.name for f in fields(cls)}
    kwargs = {}
    for key, raw in section.items():
        name = renames.get(key, key)
        if name not in names:
            raise ConfigError(f"[{section.name}]: unknown key {key!r}")
        kwargs[name] = raw
    return kwargs


def parse_robot(text: str, name: str = "custom") -> RobotConfig:
    """Build a :class:`RobotConfig` from INI text."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if not cp.has_section("robot"):
        raise ConfigError(f"{name}: missing [robot] section")
    known = {"robot", "segment", "stiffness", "damping", "actuation"}
    for sec in cp.sections():
        if sec not in known and not sec.startswith("segment."):
            raise ConfigError(f"{name}: unknown section [{sec}]")

    try:
        rob = cp["robot"]
        unknown = set(rob) - {"segments", "planar", "gravity_mm_s2", "bellows"}
        if unknown:
            raise ConfigError(f"[robot]: unknown keys {sorted(unknown)}")
        n = rob.getint("segments", 1)
        if n < 1:
            raise ConfigError("[robot]: segments must be >= 1")
        planar = rob.getboolean("planar", False)
        gravity = _floats(rob.get("gravity_mm_s2", " ".join(map(str, DEFAULT_GRAVITY))))
        if len(gravity) != 3:
            raise ConfigError("[robot]: gravity_mm_s2 needs three values")
        bellows = rob.getint("bellows", 3)

        base = dict(cp["segment"]) if cp.has_section("segment") else {}
        for sec in cp.sections():
            if sec.startswith("segment."):
                idx = sec.split(".", 1)[1]
                if not idx.isdigit() or not 1 <= int(idx) <= n:
                    raise ConfigError(f"[{sec}]: segment index must lie in 1..{n}")
        specs, masses = [], []
        for i in range(1, n + 1):
            values = dict(base)
            if cp.has_section(f"segment.{i}"):
                values.update(cp[f"segment.{i}"])
            spec, mass = _segment(values, planar, f"segment {i}")
            specs.append(spec)
            masses.append(mass)
        robot = RobotSpec(tuple(specs), tuple(gravity), bellows, tuple(masses))

        stiff = StiffnessParams()
        if cp.has_section("stiffness"):
            kw = _dataclass_from(cp["stiffness"], StiffnessParams)
            stiff = StiffnessParams(**{k: (int(v) if k == "lobes" else float(v)) for k, v in kw.items()})
        damp = DampingParams()
        if cp.has_section("damping"):
            kw = _dataclass_from(cp["damping"], DampingParams)
            r = _floats(kw.get("r", "0.1"))
            damp = DampingParams(r[0] if len(r) == 1 else tuple(r),
                                 float(kw.get("mass_proportional", 0.0)))
        act = ActuationParams(bellows=max(bellows, 3))
        if cp.has_section("actuation"):
            sec = cp["actuation"]
            kw = _dataclass_from(sec, ActuationParams, {"p_max_kpa": "p_max"})
            conv = {k: float(v) for k, v in kw.items() if k not in ("erratum_fix", "bellows")}
            if "erratum_fix" in kw:
                conv["erratum_fix"] = sec.getboolean("erratum_fix")
            conv["bellows"] = int(kw.get("bellows", bellows))
            act = ActuationParams(**conv)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    return RobotConfig(robot, DynamicsParams(stiff, damp, act), name)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list, np.ndarray)):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def dump_robot(cfg: RobotConfig) -> str:
    """INI text that :func:`parse_robot` reads back to an equal config."""
    r = cfg.robot
    out = io.StringIO()
    out.write(f"[robot]\nsegments = {r.n_segments}\nplanar = {_fmt(r.planar)}\n")
    out.write(f"gravity_mm_s2 = {_fmt(r.gravity)}\nbellows = {r.bellows}\n")
    for i, (s, m) in enumerate(zip(r.segments, r.masses), start=1):
        out.write(f"\n[segment.{i}]\n")
        out.write(f"rest_length_mm = {_fmt(s.rest_length)}\nlinks = {s.links}\nmass_g = {_fmt(m)}\n")
        out.write(f"dl_min_mm = {_fmt(s.delta_l_bounds[0])}\ndl_max_mm = {_fmt(s.delta_l_bounds[1])}\n")
        out.write(f"theta_min_rad = {_fmt(s.theta_bounds[0])}\ntheta_max_rad = {_fmt(s.theta_bounds[1])}\n")
    st = cfg.dynamics.stiffness
    out.write("\n[stiffness]\n")
    for f in fields(StiffnessParams):
        out.write(f"{f.name} = {_fmt(getattr(st, f.name))}\n")
    d = cfg.dynamics.damping
    out.write(f"\n[damping]\nr = {_fmt(d.r)}\nmass_proportional = {_fmt(d.mass_proportional)}\n")
    a = cfg.dynamics.actuation
    out.write(f"\n[actuation]\nh1 = {_fmt(a.h1)}\nh2 = {_fmt(a.h2)}\nbellows = {a.bellows}\n")
    out.write(f"p_max_kpa = {_fmt(a.p_max)}\nerratum_fix = {_fmt(a.erratum_fix)}\n")
    return out.getvalue()


def _presets() -> dict[str, RobotConfig]:
    single = RobotConfig(RobotSpec.uniform(1, links=6), DynamicsParams(), "single")
    two = RobotConfig(RobotSpec.uniform(2, links=6), DynamicsParams(), "two")
    planar = RobotSpec.uniform(4, links=6, planar=True, gravity=PLANAR_GRAVITY)
    planar4 = RobotConfig(planar, PLANAR_DYNAMICS, "planar4")
    return {"single": single, "two": two, "planar4": planar4}


# The planar arm moves in the horizontal plane, so gravity is normal to it.
PLANAR_GRAVITY = (0.0, -9810.0, 0.0)
# Mass-proportional damping of 20/s gives the kp = 1000, kv = 5 loop a damping
# ratio near 0.4; without it the start-up transient rings for seconds.
PLANAR_DYNAMICS = DynamicsParams(damping=DampingParams(0.1, 20.0))


def preset(name: str) -> RobotConfig:
    table = _presets()
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(table)}")
    return table[name]


PRESET_NAMES = ("single", "two", "planar4")


def load_robot(source) -> RobotConfig:
    """Load a robot from an INI file path or a preset name."""
    if isinstance(source, RobotConfig):
        return source
    text = str(source)
    if text in PRESET_NAMES:
        return preset(text)
    path = Path(text)
    try:
        content = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read robot file {path}: {exc}") from exc
    return parse_robot(content, path.stem)


__all__ = ["ConfigError", "RobotConfig", "parse_robot", "dump_robot", "load_robot",
           "preset", "PRESET_NAMES", "PLANAR_GRAVITY", "PLANAR_DYNAMICS"]

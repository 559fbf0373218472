"""Command-line workflows: solve, track, bench, validate and traj-gen.

Every command writes a CSV whose body depends only on its inputs, plus a JSON
summary that also carries wall-clock timings. Exit codes: 0 ok, 1 validation
failure, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from .config import ConfigError, RobotConfig, load_robot
from .control import Gains, SimulationSettings, simulate_tracking, tracking_error_metrics
from .dynamics import DynState, IntegrationError, state_from_config
from .geometry import (
    DimensionError,
    OutOfRangeError,
    UnreachableError,
    analytic_ik_single,
    arc_endpoint,
    drift_ratio,
    embed_target,
    tip_position,
    workspace_extent,
)
from .ik import (
    NUMERICAL_FAILURE,
    IkSettings,
    NO_TASK,
    SecondaryTask,
    smoothness_ratio,
    solve_point,
    solve_trajectory,
)
from .trajectory import SHAPES, Trajectory, generate, read_csv, resample, write_csv

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL = 3

DEFAULT_POINTS = {"flower": 1150, "circle2d": 400, "circle3d": 400}
VALIDATION_TOLERANCE = 1e-5
DEGENERATE_THETA = 1e-4  # rad; below this phi is not identifiable
BENCH_CHUNK = 25  # points per interleaved timing slice


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    robot: RobotConfig
    trajectory: str = "shape:flower"
    points: int | None = None
    duration: float | None = None
    shape_params: dict = field(default_factory=dict)
    tip_angle_deg: float | None = None
    compensated: bool = True
    gains: Gains = field(default_factory=Gains)
    dt: float = 1e-3
    control_rate: float = 250.0
    sim_time: float | None = None
    use_pressures: bool = False
    out: Path = Path("out")
    seed: int = 0
    timings: bool = False

    @property
    def task(self) -> SecondaryTask:
        if self.tip_angle_deg is None:
            return NO_TASK
        return SecondaryTask.tip_angle(math.radians(self.tip_angle_deg))

    @property
    def ik_settings(self) -> IkSettings:
        return IkSettings(compensated=self.compensated)


@dataclass(frozen=True)
class BenchRow:
    n_links: int
    n_points: int
    mean_residual_mm: float
    max_residual_mm: float
    mean_residual_pct: float
    max_residual_pct: float
    mean_solve_ms: float
    total_solve_s: float
    iterations: int
    uncompensated_length_error_pct: float
    uncompensated_tip_error_mm: float


# ------------------------------------------------------------------ helpers

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])


def _write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=float) + "\n")


def _shape_params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = int(value) if key.strip() == "petals" else float(value)
    return out


def load_trajectory(cfg: RunConfig) -> Trajectory:
    """Resolve ``shape:NAME`` or a CSV path into targets for the robot."""
    src = cfg.trajectory
    robot = cfg.robot.robot
    try:
        if src.startswith("shape:"):
            shape = src.split(":", 1)[1]
            if shape not in SHAPES:
                raise CliError(f"unknown shape {shape!r}; choose from {', '.join(SHAPES)}")
            n = cfg.points or DEFAULT_POINTS[shape]
            traj = generate(shape, n, cfg.duration, **cfg.shape_params)
        else:
            path = Path(src)
            if not path.is_file():
                raise CliError(f"trajectory file {path} not found")
            traj = read_csv(path, planar=robot.planar or None)
            if cfg.points:
                traj = resample(traj, cfg.points)
    except CliError:
        raise
    except (ValueError, OSError) as exc:
        raise CliError(str(exc)) from exc
    if traj.planar and not robot.planar:
        raise CliError("a planar trajectory needs a planar robot")
    if robot.planar and traj.points.shape[1] != 2:
        raise CliError("a planar robot needs a planar trajectory (t,x,y)")
    return traj


def characteristic_length(traj: Trajectory) -> float:
    if traj.characteristic_radius:
        return float(traj.characteristic_radius)
    c = traj.points.mean(axis=0)
    r = float(np.linalg.norm(traj.points - c, axis=1).mean())
    return r if r > 0 else 1.0


def _config_columns(robot) -> list[str]:
    cols = []
    for i in range(1, robot.n_segments + 1):
        cols += [f"dl{i}", f"theta{i}", f"phi{i}"]
    return cols


# ------------------------------------------------------------------ commands

def cmd_solve(cfg: RunConfig) -> int:
    robot = cfg.robot.robot
    traj = load_trajectory(cfg)
    t0 = time.perf_counter()
    results = solve_trajectory(robot, traj, cfg.task, cfg.ik_settings)
    total = time.perf_counter() - t0
    failed = next((i for i, r in enumerate(results) if r.status == NUMERICAL_FAILURE), None)
    kept = results if failed is None else results[: failed + 1]

    extent = workspace_extent(robot)
    header = (["index", "t", "target_x", "target_y", "target_z"] + _config_columns(robot)
              + ["achieved_x", "achieved_y", "achieved_z", "residual_mm", "residual_pct",
                 "secondary_residual_rad", "iterations", "status"])
    if cfg.timings:
        header.append("solve_ms")
    rows = []
    for i, (t, p, r) in enumerate(zip(traj.times, traj.points, kept)):
        row = [i, t, *embed_target(robot, p), *r.config.as_array().ravel(), *r.achieved,
               r.residual, 100.0 * r.residual / extent, r.secondary_residual, r.iterations, r.status]
        if cfg.timings:
            row.append(1e3 * r.solve_time)
        rows.append(row)
    _write_csv(cfg.out / "solve.csv", header, rows)

    res = np.array([r.residual for r in kept])
    sec = [r.secondary_residual for r in kept if r.secondary_residual is not None]
    statuses = {}
    for r in kept:
        statuses[r.status] = statuses.get(r.status, 0) + 1
    summary = {
        "command": "solve",
        "robot": cfg.robot.name,
        "trajectory": cfg.trajectory,
        "n_points": len(kept),
        "compensated": cfg.compensated,
        "mean_residual_mm": float(res.mean()),
        "max_residual_mm": float(res.max()),
        "mean_residual_pct": float(100.0 * res.mean() / extent),
        "max_secondary_residual_rad": max(sec) if sec else None,
        "smoothness_ratio": smoothness_ratio(robot, [r.config for r in kept]),
        "status_counts": statuses,
        "total_time_s": total,
        "mean_time_ms": 1e3 * total / len(results),
    }
    _write_json(cfg.out / "solve_summary.json", summary)
    if failed is not None:
        raise CliError(f"numerical failure at point {failed}; partial results written",
                       EXIT_NUMERICAL)
    return EXIT_OK


def cmd_track(cfg: RunConfig) -> int:
    robot, params = cfg.robot.robot, cfg.robot.dynamics
    traj = load_trajectory(cfg)
    t0 = time.perf_counter()
    results = solve_trajectory(robot, traj, cfg.task, cfg.ik_settings)
    ik_time = time.perf_counter() - t0
    bad = next((i for i, r in enumerate(results) if r.status == NUMERICAL_FAILURE), None)
    if bad is not None:
        raise CliError(f"inverse kinematics failed at point {bad}", EXIT_NUMERICAL)
    try:
        desired = np.array([state_from_config(r.config, robot) for r in results])
        settings = SimulationSettings(control_rate=cfg.control_rate, dt=cfg.dt,
                                      duration=cfg.sim_time, use_pressures=cfg.use_pressures)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    t1 = time.perf_counter()
    try:
        trace = simulate_tracking(robot, desired, traj.times, cfg.gains, params, settings,
                                  DynState.zeros(robot))
    except IntegrationError as exc:
        raise CliError(f"simulation failed: {exc}. Held torques can destabilize stiff "
                       f"multi-segment arms; try a faster --control-rate (e.g. 1000)",
                       EXIT_NUMERICAL) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    sim_time = time.perf_counter() - t1

    header, table = trace.columns()
    _write_csv(cfg.out / "track.csv", header, table)
    metrics = tracking_error_metrics(trace, traj, robot,
                                     characteristic_length=characteristic_length(traj))
    summary = {
        "command": "track",
        "robot": cfg.robot.name,
        "trajectory": cfg.trajectory,
        "kp": cfg.gains.kp,
        "kv": cfg.gains.kv,
        "dt": cfg.dt,
        "control_rate_hz": cfg.control_rate,
        "ticks": len(trace),
        "ik_time_s": ik_time,
        "simulation_time_s": sim_time,
        **metrics.as_dict(),
    }
    if trace.u is not None:
        summary["clamped_pressure_fraction"] = float(
            np.mean((trace.u <= 0.0) | (trace.u >= params.actuation.p_max)))
    _write_json(cfg.out / "track_metrics.json", summary)
    return EXIT_OK


def parse_links(text: str) -> list[int]:
    """``"2-30"``, ``"2,4,8"`` or a mix such as ``"1-3,6"``."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                a, b = part.split("-", 1)
                out += list(range(int(a), int(b) + 1))
            elif part:
                out.append(int(part))
    except ValueError as exc:
        raise CliError(f"bad link list {text!r}") from exc
    if not out:
        raise CliError("link list is empty")
    if min(out) < 1:
        raise CliError("link counts must be >= 1")
    return sorted(set(out))


def _last_good(results):
    for r in reversed(results):
        if r.status != NUMERICAL_FAILURE:
            return r.config
    return None


def run_bench(cfg: RunConfig, links: list[int], repeats: int = 3) -> tuple[list[BenchRow], dict]:
    """Solve the trajectory once per link count and report median wall time.

    Timing noise on a shared host drifts over seconds, which is slower than
    one solve. So the trajectory is cut into chunks of ``BENCH_CHUNK`` points
    and every link count solves each chunk back to back, in a fresh order drawn
    from ``cfg.seed``, carrying its own warm start from chunk to chunk. Drift
    then hits all link counts alike, and the results equal one sequential
    solve. One untimed warm-up solve comes first; repetitions give a median.
    """
    if not links or min(links) < 1:
        raise CliError("link counts must be >= 1")
    if repeats < 1:
        raise CliError("repeats must be >= 1")
    traj = load_trajectory(cfg)
    links = sorted(set(links))
    robots = {n: cfg.robot.robot.with_links(n) for n in links}
    solve_trajectory(robots[links[0]], traj, cfg.task, cfg.ik_settings)
    chunks = [traj.points[i:i + BENCH_CHUNK] for i in range(0, len(traj), BENCH_CHUNK)]
    times = {n: [] for n in links}
    rng = np.random.default_rng(cfg.seed)
    for _ in range(repeats):
        results = {n: [] for n in links}
        elapsed = dict.fromkeys(links, 0.0)
        for chunk in chunks:
            for n in rng.permutation(links).tolist():
                warm = _last_good(results[n])
                t0 = time.perf_counter()
                part = solve_trajectory(robots[n], chunk, cfg.task, cfg.ik_settings, warm)
                elapsed[n] += time.perf_counter() - t0
                results[n] += part
        for n in links:
            times[n].append(elapsed[n])
    rows = []
    for n in links:
        robot, res_n = robots[n], results[n]
        total = float(np.median(times[n]))
        res = np.array([r.residual for r in res_n])
        extent = workspace_extent(robot)
        targets = [embed_target(robot, p) for p in traj.points]
        drift = [np.linalg.norm(tip_position(robot, r.config, False) - p)
                 for r, p in zip(res_n, targets)]
        rows.append(BenchRow(
            n_links=n, n_points=len(traj),
            mean_residual_mm=float(res.mean()), max_residual_mm=float(res.max()),
            mean_residual_pct=float(100.0 * res.mean() / extent),
            max_residual_pct=float(100.0 * res.max() / extent),
            mean_solve_ms=1e3 * total / len(traj), total_solve_s=total,
            iterations=int(sum(r.iterations for r in res_n)),
            uncompensated_length_error_pct=100.0 * (1.0 - 1.0 / drift_ratio(math.pi / 2, n)),
            uncompensated_tip_error_mm=float(np.mean(drift)),
        ))
    ns = [r.n_links for r in rows]
    tt = [r.total_solve_s for r in rows]
    rho = float(spearmanr(ns, tt).statistic) if len(rows) > 2 else float("nan")
    means = [r.mean_residual_mm for r in rows]
    floor = cfg.ik_settings.position_tolerance * 1e-3
    summary = {
        "command": "bench",
        "robot": cfg.robot.name,
        "trajectory": cfg.trajectory,
        "repeats": repeats,
        "spearman_rho_time_vs_links": rho,
        "residual_spread": max(means) / max(min(means), floor),
        "total_time_s": float(sum(sum(v) for v in times.values())),
    }
    return rows, summary


def cmd_bench(cfg: RunConfig, links: list[int], repeats: int = 3) -> int:
    rows, summary = run_bench(cfg, links, repeats)
    header = list(BenchRow.__dataclass_fields__)
    _write_csv(cfg.out / "bench.csv", header, [[getattr(r, h) for h in header] for r in rows])
    _write_json(cfg.out / "bench_summary.json", summary)
    return EXIT_OK


def random_reachable_targets(spec, n: int, seed: int, compensated: bool = True) -> np.ndarray:
    """Tips of ``n`` configs drawn uniformly inside the segment's bounds.

    Without compensation the straight links reach the arc that is ``ratio``
    times longer than their summed length, so the draw is over link
    configurations and a target is kept only when the arc through it is also
    inside the bounds. Both the chain solution and the oracle then exist.
    """
    rng = np.random.default_rng(seed)
    lo, hi = spec.delta_l_bounds
    tlo, thi = spec.theta_bounds
    out = []
    while len(out) < n:
        dl = rng.uniform(lo, hi)
        th = rng.uniform(tlo, thi)
        ph = rng.uniform(-math.pi, math.pi)
        length = spec.rest_length + dl
        if not compensated:
            length *= drift_ratio(th, spec.links)
            if length - spec.rest_length > hi:
                continue
        out.append(arc_endpoint(length, th, ph))
    return np.array(out)


def _wrapped(d: float) -> float:
    return (d + math.pi) % (2.0 * math.pi) - math.pi


def run_validate(cfg: RunConfig, random_points: int | None = None):
    """Compare IK against the closed-form single-segment inverse."""
    robot = cfg.robot.robot
    if robot.n_segments != 1:
        raise CliError("the analytic oracle is defined for single-segment robots only")
    spec = robot.segments[0]
    settings = cfg.ik_settings
    if random_points:
        targets = random_reachable_targets(spec, random_points, cfg.seed, cfg.compensated)
        results = [solve_point(robot, p, None, NO_TASK, settings) for p in targets]
    else:
        traj = load_trajectory(cfg)
        targets = np.array([embed_target(robot, p) for p in traj.points])
        results = solve_trajectory(robot, traj, NO_TASK, settings)

    n = spec.links
    rows, failures = [], 0
    worst = {"dl": 0.0, "theta": 0.0, "phi": 0.0}
    for i, (p, r) in enumerate(zip(targets, results)):
        try:
            ref = analytic_ik_single(p, spec)
        except OutOfRangeError as exc:
            ref = exc.solution
        except UnreachableError as exc:
            raise CliError(f"point {i}: {exc}") from exc
        ik = r.config[0]
        predicted = 0.0
        if not cfg.compensated:
            predicted = (spec.rest_length + ref.delta_l) * (1.0 / drift_ratio(ref.theta, n) - 1.0)
        d_dl = ik.delta_l - ref.delta_l
        d_th = ik.theta - ref.theta
        degenerate = abs(ref.theta) < DEGENERATE_THETA
        d_ph = 0.0 if degenerate or robot.planar else _wrapped(ik.phi - ref.phi)
        ok = (abs(d_dl - predicted) <= VALIDATION_TOLERANCE and abs(d_th) <= VALIDATION_TOLERANCE
              and abs(d_ph) <= VALIDATION_TOLERANCE)
        failures += not ok
        worst["dl"] = max(worst["dl"], abs(d_dl - predicted))
        worst["theta"] = max(worst["theta"], abs(d_th))
        worst["phi"] = max(worst["phi"], abs(d_ph))
        rows.append([i, *p, ik.delta_l, ik.theta, ik.phi, ref.delta_l, ref.theta, ref.phi,
                     d_dl, d_th, d_ph, predicted, degenerate, r.residual, ok])
    summary = {
        "command": "validate",
        "robot": cfg.robot.name,
        "targets": f"random:{random_points}" if random_points else cfg.trajectory,
        "seed": cfg.seed,
        "compensated": cfg.compensated,
        "n_points": len(rows),
        "failures": failures,
        "tolerance": VALIDATION_TOLERANCE,
        "max_abs_delta": worst,
    }
    return rows, summary


VALIDATE_HEADER = ["index", "target_x", "target_y", "target_z", "ik_dl", "ik_theta", "ik_phi",
                   "oracle_dl", "oracle_theta", "oracle_phi", "delta_dl", "delta_theta",
                   "delta_phi", "predicted_delta_dl", "phi_degenerate", "residual_mm", "pass"]


def cmd_validate(cfg: RunConfig, random_points: int | None = None) -> int:
    rows, summary = run_validate(cfg, random_points)
    _write_csv(cfg.out / "validate.csv", VALIDATE_HEADER, rows)
    _write_json(cfg.out / "validate_summary.json", summary)
    if summary["failures"]:
        raise CliError(f"{summary['failures']} point(s) differ from the oracle by more than "
                       f"{VALIDATION_TOLERANCE}", EXIT_VALIDATION)
    return EXIT_OK


def cmd_traj_gen(cfg: RunConfig, filename: str = "trajectory.csv") -> int:
    if not cfg.trajectory.startswith("shape:"):
        raise CliError("traj-gen needs --trajectory shape:NAME")
    shape = cfg.trajectory.split(":", 1)[1]
    if shape not in SHAPES:
        raise CliError(f"unknown shape {shape!r}; choose from {', '.join(SHAPES)}")
    try:
        traj = generate(shape, cfg.points or DEFAULT_POINTS[shape], cfg.duration,
                        **cfg.shape_params)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_csv(traj, cfg.out / filename)
    return EXIT_OK


# ------------------------------------------------------------------ parsing

def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--robot", default=None,
                        help="robot INI file or preset (single, two, planar4)")
    common.add_argument("--trajectory", default=None,
                        help="CSV file (t,x,y[,z]) or shape:NAME")
    common.add_argument("--points", type=_positive_int, default=None)
    common.add_argument("--duration", type=float, default=None,
                        help="timestamp span of generated shapes (s)")
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="shape parameter, e.g. z0=100 (repeatable)")
    common.add_argument("--tip-angle", type=float, default=None, metavar="DEG")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-compensation", action="store_true",
                        help="use plain rigid links without drift compensation")

    p = argparse.ArgumentParser(prog="pccik", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="inverse kinematics over a trajectory")
    s.add_argument("--timings", action="store_true", help="add a per-point solve_ms column")

    t = sub.add_parser("track", parents=[common], help="IK followed by closed-loop simulation")
    t.add_argument("--kp", type=float, default=1000.0)
    t.add_argument("--kv", type=float, default=5.0)
    t.add_argument("--dt", type=float, default=1e-3, help="integrator step (s)")
    t.add_argument("--control-rate", type=float, default=250.0, help="Hz")
    t.add_argument("--sim-time", type=float, default=None,
                   help="simulated seconds (default: trajectory span)")
    t.add_argument("--pressures", action="store_true",
                   help="route torques through clamped bellows pressures")
    t.add_argument("--erratum-fix", type=_bool, default=None, metavar="BOOL",
                   help="use the rank-3 input mapping (default from the robot file)")
    t.add_argument("--no-gravity", action="store_true")

    b = sub.add_parser("bench", parents=[common], help="solve time and accuracy versus link count")
    b.add_argument("--links", default="2-30", help="e.g. 2-30 or 2,4,8")
    b.add_argument("--repeats", type=_positive_int, default=3)

    v = sub.add_parser("validate", parents=[common], help="compare IK with the analytic inverse")
    v.add_argument("--random", type=_positive_int, default=None, metavar="N",
                   help="use N random reachable targets instead of a trajectory")

    sub.add_parser("traj-gen", parents=[common], help="write a generated trajectory as CSV")
    return p


_DEFAULT_ROBOT = {"solve": "single", "track": "planar4", "bench": "single",
                  "validate": "single", "traj-gen": "single"}
_DEFAULT_TRAJECTORY = {"solve": "shape:flower", "track": "shape:circle2d",
                       "bench": "shape:flower", "validate": "shape:flower",
                       "traj-gen": "shape:flower"}


def run_config_from_args(args) -> RunConfig:
    try:
        robot_cfg = load_robot(args.robot or _DEFAULT_ROBOT[args.command])
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    if getattr(args, "no_gravity", False):
        robot_cfg = replace(robot_cfg, robot=robot_cfg.robot.without_gravity())
    if getattr(args, "erratum_fix", None) is not None:
        act = replace(robot_cfg.dynamics.actuation, erratum_fix=args.erratum_fix)
        robot_cfg = replace(robot_cfg, dynamics=replace(robot_cfg.dynamics, actuation=act))
    kw = {}
    if args.command == "track":
        try:
            kw["gains"] = Gains(args.kp, args.kv)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        kw.update(dt=args.dt, control_rate=args.control_rate, sim_time=args.sim_time,
                  use_pressures=args.pressures)
    if args.command == "solve":
        kw["timings"] = args.timings
    return RunConfig(
        robot=robot_cfg,
        trajectory=args.trajectory or _DEFAULT_TRAJECTORY[args.command],
        points=args.points,
        duration=args.duration,
        shape_params=_shape_params(args.param),
        tip_angle_deg=args.tip_angle,
        compensated=not args.no_compensation,
        out=Path(args.out),
        seed=args.seed,
        **kw,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = run_config_from_args(args)
        if cfg.tip_angle_deg is not None and not cfg.robot.robot.planar:
            raise CliError("--tip-angle needs a planar robot")
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "track":
            return cmd_track(cfg)
        if args.command == "bench":
            return cmd_bench(cfg, parse_links(args.links), args.repeats)
        if args.command == "validate":
            return cmd_validate(cfg, args.random)
        return cmd_traj_gen(cfg)
    except CliError as exc:
        print(f"pccik {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (DimensionError, ValueError) as exc:
        print(f"pccik {args.command}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

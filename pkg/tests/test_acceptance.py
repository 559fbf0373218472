"""Acceptance suite: one test per primary criterion, each printing PASS or FAIL.

Run ``pytest tests/test_acceptance.py -v``; the lines appear in the
"acceptance criteria" section of the terminal summary.
"""

import json
import math
import time

import numpy as np
import pytest

from pccik.cli import main
from pccik.config import preset
from pccik.dynamics import (
    ActuationParams,
    DampingParams,
    DynamicsParams,
    DynState,
    StiffnessParams,
    coriolis_matrix,
    elastic_potential,
    gravitational_potential,
    gravity_vector,
    input_mapping,
    mass_matrix,
    step_dynamics,
    stiffness_vector,
    total_energy,
)
from pccik.geometry import (
    ConfigVector,
    RobotSpec,
    arc_endpoint,
    drift_ratio,
    tip_position,
    workspace_extent,
)
from pccik.ik import SecondaryTask, smoothness_ratio, solve_trajectory
from pccik.trajectory import generate

pytestmark = pytest.mark.acceptance


def summary(path):
    return json.loads(path.read_text())


def test_single_segment_flower(criterion):
    robot = preset("single").robot
    traj = generate("flower", 1150)
    t0 = time.perf_counter()
    res = solve_trajectory(robot, traj)
    elapsed = time.perf_counter() - t0
    mean = float(np.mean([r.residual for r in res]))
    pct = 100 * mean / workspace_extent(robot)
    criterion("single-segment IK accuracy",
              robot.segments[0].links == 6 and mean <= 1e-3 and pct <= 1e-3 and elapsed <= 30,
              f"mean {mean:.3e} mm ({pct:.3e} %), {elapsed:.2f} s for {len(res)} points")


def test_oracle_equivalence(tmp_path, criterion):
    code = main(["validate", "--random", "1000", "--out", str(tmp_path)])
    s = summary(tmp_path / "validate_summary.json")
    worst = max(s["max_abs_delta"].values())
    criterion("oracle equivalence", code == 0 and s["failures"] == 0 and worst <= 1e-5,
              f"{s['n_points']} targets, worst |delta| {worst:.2e}, failures {s['failures']}")


def test_drift_compensation(criterion):
    ratio = drift_ratio(math.pi / 2, 10)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(2000):
        n = int(rng.integers(1, 60))
        L = float(rng.uniform(20, 200))
        dl, th, ph = rng.uniform(-0.2 * L, 0.5 * L), rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi)
        robot = RobotSpec.uniform(1, rest_length=L, links=n)
        tip = tip_position(robot, ConfigVector.from_array([[dl, th, ph]]))
        worst = max(worst, float(np.linalg.norm(tip - arc_endpoint(L + dl, th, ph))))
    criterion("drift compensation", abs(ratio - 1.0010) <= 1e-4 and worst <= 1e-9,
              f"drift_ratio(pi/2, 10) = {ratio:.6f}, worst FK-arc gap {worst:.2e} mm")


def test_two_segment_flower(criterion):
    robot = preset("two").robot.with_links(6)
    traj = generate("flower", 1000, z0=100.0)
    res = solve_trajectory(robot, traj)
    mean = float(np.mean([r.residual for r in res]))
    smooth = smoothness_ratio(robot, [r.config for r in res])
    criterion("multi-segment IK", mean <= 1e-3 and smooth <= 10,
              f"mean {mean:.3e} mm, max/median config step {smooth:.2f}")


def test_tip_angle_task(criterion):
    robot = preset("planar4").robot
    angle = math.radians(30)
    res = solve_trajectory(robot, generate("circle2d", 400), SecondaryTask.tip_angle(angle))
    worst_pos = max(r.residual for r in res)
    worst_angle = max(abs(sum(s.theta for s in r.config) - angle) for r in res)
    criterion("tip-angle secondary task", worst_pos <= 1e-6 and worst_angle <= 1e-4,
              f"worst position {worst_pos:.2e} mm, worst |sum theta - 30 deg| {worst_angle:.2e} rad")


def test_closed_loop_tracking(tmp_path, criterion):
    # 1 kHz control: at 250 Hz the held torque destabilizes the 4-segment arm
    code = main(["track", "--tip-angle", "30", "--kp", "1000", "--kv", "5",
                 "--control-rate", "1000", "--out", str(tmp_path)])
    m = summary(tmp_path / "track_metrics.json")
    pct = m["steady_state_error_pct"]
    criterion("closed-loop tracking", code == 0 and pct <= 5.0,
              f"steady-state error {pct:.3f} % of the {m['characteristic_length_mm']:.0f} mm radius "
              f"at {m['control_rate_hz']:.0f} Hz")


def _fd_gradient(f, q, steps):
    g = np.zeros_like(q)
    for k in range(q.size):
        e = np.zeros_like(q)
        e[k] = steps[k]
        g[k] = (f(q + e) - f(q - e)) / (2 * steps[k])
    return g


def test_dynamics_property_suite(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    robots = [RobotSpec.uniform(1, links=6), RobotSpec.uniform(2, links=4),
              RobotSpec(RobotSpec.uniform(2, links=4, planar=True).segments, (0.0, -9810.0, -3000.0))]
    stiff = StiffnessParams(a1=8e6, a2=4e6, a4=2e6, a5=1e6)
    worst = dict(spd=np.inf, skew=0.0, K=0.0, G=0.0)
    for robot in robots:
        per = 2 if robot.planar else 3
        for _ in range(3):
            q = rng.uniform(-0.01, 0.01, per * robot.n_segments)
            q[::per] = rng.uniform(-0.15, 0.3, robot.n_segments)
            qd = rng.normal(size=q.size) * np.where(np.arange(q.size) % per == 0, 1.0, 0.01)
            M = mass_matrix(robot, q)
            worst["spd"] = min(worst["spd"], float(np.linalg.eigvalsh(M).min()))
            h = 1e-4
            Mdot = (mass_matrix(robot, q + h * qd) - mass_matrix(robot, q - h * qd)) / (2 * h)
            N = Mdot - 2 * coriolis_matrix(robot, q, qd)
            worst["skew"] = max(worst["skew"], np.linalg.norm(N + N.T) / np.linalg.norm(M))
            steps = np.full(q.size, 1e-6 / 64.4)
            steps[::per] = 1e-6
            fd = _fd_gradient(lambda x: elastic_potential(x, stiff, robot), q, steps)
            worst["K"] = max(worst["K"], np.linalg.norm(stiffness_vector(q, stiff, robot) - fd)
                             / np.linalg.norm(fd))
            gsteps = steps * 10
            fd = _fd_gradient(lambda x: gravitational_potential(robot, x), q, gsteps)
            worst["G"] = max(worst["G"], np.linalg.norm(gravity_vector(robot, q) - fd)
                             / np.linalg.norm(fd))

    robot = RobotSpec.uniform(2, links=4).without_gravity()
    q0, v0 = np.tile([0.05, 0.01, -0.005], 2), np.tile([0.3, 0.03, 0.04], 2)
    drift = 0.0
    free = DynamicsParams(stiffness=stiff, damping=DampingParams(0.0))
    s = DynState(q0, v0)
    E0 = total_energy(robot, s, free)
    for _ in range(1000):
        s = step_dynamics(robot, s, np.zeros(6), 1e-3, free)
        drift = max(drift, abs(total_energy(robot, s, free) - E0) / E0)

    damped = DynamicsParams(stiffness=stiff, damping=DampingParams(0.1, 5.0))
    s = DynState(q0, v0)
    E = [total_energy(robot, s, damped)]
    for _ in range(300):
        s = step_dynamics(robot, s, np.zeros(6), 1e-3, damped)
        E.append(total_energy(robot, s, damped))
    monotone = bool(np.all(np.diff(E) <= 1e-12 * E[0]))
    elapsed = time.perf_counter() - t0

    ok = (worst["spd"] > 0 and worst["skew"] <= 1e-6 and worst["K"] <= 1e-6
          and worst["G"] <= 1e-6 and drift <= 1e-3 and monotone and elapsed <= 60)
    criterion("dynamics property suite", ok,
              f"min eig(M) {worst['spd']:.2e}, skew {worst['skew']:.1e}, K {worst['K']:.1e}, "
              f"G {worst['G']:.1e}, energy drift {drift:.1e}, damped monotone {monotone}, "
              f"{elapsed:.1f} s")


def test_input_mapping_erratum(criterion):
    printed = input_mapping(ActuationParams(erratum_fix=False))
    fixed = input_mapping(ActuationParams())
    ones = fixed @ np.ones(3)
    ok = (np.linalg.matrix_rank(printed) <= 2 and np.array_equal(printed[1], -printed[2])
          and np.linalg.matrix_rank(fixed) == 3
          and np.allclose(ones, [3 * 8e-4, 0, 0], rtol=1e-12, atol=1e-18))
    criterion("input-mapping erratum", ok,
              f"printed rank {np.linalg.matrix_rank(printed)}, fixed rank "
              f"{np.linalg.matrix_rank(fixed)}, H(1,1,1) = {np.array2string(ones, precision=3)}")


def test_benchmark_trend(tmp_path, criterion):
    code = main(["bench", "--links", "2-30", "--out", str(tmp_path)])
    s = summary(tmp_path / "bench_summary.json")
    rho, spread = s["spearman_rho_time_vs_links"], s["residual_spread"]
    criterion("benchmark trend", code == 0 and rho > 0.9 and spread <= 10,
              f"Spearman rho {rho:.3f} over n = 2..30, accuracy spread {spread:.2f}x, "
              f"{s['total_time_s']:.0f} s of solving")

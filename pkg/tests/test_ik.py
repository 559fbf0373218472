import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pccik.geometry import (
    ConfigVector,
    RobotSpec,
    SegmentConfig,
    SegmentSpec,
    analytic_ik_single,
    arc_endpoint,
    drift_ratio,
    tip_position,
)
from pccik.ik import (
    CONVERGED,
    INFEASIBLE_SECONDARY,
    MAX_ITER,
    IkSettings,
    NO_TASK,
    SecondaryTask,
    bending_coordinates,
    config_steps,
    shortfall_residual,
    smoothness_ratio,
    solve_point,
    solve_trajectory,
    tip_angle_residual,
)
from pccik.trajectory import generate

SINGLE = RobotSpec.uniform(1, links=6)
SPEC = SINGLE.segments[0]
PLANAR4 = RobotSpec.uniform(4, links=6, planar=True)


def planar_cfg(thetas):
    return ConfigVector(tuple(SegmentConfig(0.0, t, 0.0) for t in thetas))


def assert_within_bounds(robot, config):
    for spec, s in zip(robot.segments, config):
        lo, hi = spec.delta_l_bounds
        tlo, thi = spec.theta_bounds
        assert lo <= s.delta_l <= hi
        assert tlo <= s.theta <= thi
        assert -math.pi < s.phi <= math.pi


def test_pure_extension():
    dl_max = SPEC.delta_l_bounds[1]
    res = solve_point(SINGLE, [0, 0, SPEC.rest_length + dl_max / 2])
    c = res.config[0]
    assert c.delta_l == pytest.approx(dl_max / 2, abs=1e-9)
    assert c.theta == pytest.approx(0.0, abs=1e-9)
    assert res.residual <= 1e-9
    assert res.status == CONVERGED


def test_flower_point_matches_oracle():
    traj = generate("flower", 50)
    for p in traj.points[::7]:
        res = solve_point(SINGLE, p)
        ref = analytic_ik_single(p, SPEC)
        c = res.config[0]
        assert c.delta_l == pytest.approx(ref.delta_l, abs=1e-6)
        assert c.theta == pytest.approx(ref.theta, abs=1e-6)
        assert c.phi == pytest.approx(ref.phi, abs=1e-6)


def test_planar_tip_angle_point():
    task = SecondaryTask.tip_angle(math.radians(30))
    res = solve_point(PLANAR4, [175 + 50, 100], task=task)
    assert res.residual <= 1e-6
    assert abs(sum(s.theta for s in res.config) - math.radians(30)) <= 1e-4
    assert res.secondary_residual <= 1e-4


def test_tip_angle_residual_examples():
    assert tip_angle_residual(planar_cfg([0, 0, 0, 0]), 0.0) == 0.0
    t = math.pi / 6
    assert tip_angle_residual(planar_cfg([t / 2, t / 2, 0, 0]), t) == pytest.approx(0.0, abs=1e-15)
    assert tip_angle_residual(planar_cfg([t, t, 0, 0]), t) == pytest.approx(-t)


def test_tip_angle_needs_planar():
    bent = ConfigVector((SegmentConfig(0, 0.3, 0.4),))
    with pytest.raises(ValueError):
        tip_angle_residual(bent, 0.1)
    with pytest.raises(ValueError):
        tip_angle_residual(bent, 0.1, SINGLE)
    with pytest.raises(ValueError):
        solve_point(SINGLE, [10, 0, 60], task=SecondaryTask.tip_angle(0.2))
    with pytest.raises(ValueError):
        SecondaryTask("orientation")


def test_settings_validation():
    with pytest.raises(ValueError):
        IkSettings(position_tolerance=0)
    with pytest.raises(ValueError):
        IkSettings(max_iterations=0)
    with pytest.raises(ValueError):
        IkSettings(gradient="exact")


def test_constant_trajectory_reuses_warm_start():
    p = tip_position(SINGLE, ConfigVector((SegmentConfig(5.0, 1.0, 0.4),)))
    results = solve_trajectory(SINGLE, np.tile(p, (10, 1)))
    first = results[0].config.as_array()
    for r in results[1:]:
        np.testing.assert_array_equal(r.config.as_array(), first)
        assert r.iterations <= 1


def test_unreachable_target_reports_shortfall():
    far = [0.0, 0.0, 200.0]
    res = solve_point(SINGLE, far)
    assert res.status == MAX_ITER
    assert res.residual == pytest.approx(shortfall_residual(SINGLE, far), abs=1e-6)
    assert res.config[0].delta_l == SPEC.delta_l_bounds[1]


def test_infeasible_secondary_keeps_position():
    # a 1-segment planar arm has no redundancy: the tip angle is fixed by the target
    robot = RobotSpec.uniform(1, planar=True)
    target = [30.0, 50.0]
    res = solve_point(robot, target, task=SecondaryTask.tip_angle(0.0))
    assert res.status == INFEASIBLE_SECONDARY
    assert res.residual <= IkSettings().position_tolerance
    assert res.secondary_residual > 0.1


def test_fd_gradient_mode_agrees():
    p = [20.0, -15.0, 55.0]
    a = solve_point(SINGLE, p)
    b = solve_point(SINGLE, p, settings=IkSettings(gradient="fd"))
    np.testing.assert_allclose(a.config.as_array(), b.config.as_array(), atol=1e-6)


def test_uncompensated_ik_length_shortfall():
    # the plain chain reaches drift_ratio times farther, so IK solves a shorter length
    p = arc_endpoint(SPEC.rest_length + 5.0, 1.2, 0.7)
    res = solve_point(SINGLE, p, settings=IkSettings(compensated=False))
    length = SPEC.rest_length + res.config[0].delta_l
    assert length == pytest.approx((SPEC.rest_length + 5.0) / drift_ratio(1.2, SPEC.links), abs=1e-6)


def test_smoothness_helpers():
    robot = RobotSpec.uniform(1, rest_length=10.0)
    a = ConfigVector((SegmentConfig(1.0, 0.5, 0.0),))
    b = ConfigVector((SegmentConfig(1.0, 0.5, math.pi / 2),))
    np.testing.assert_allclose(bending_coordinates(robot, a), [1.0, 5.0, 0.0], atol=1e-12)
    # (theta, phi) and (-theta, phi + pi) describe the same arc
    mirrored = ConfigVector((SegmentConfig(1.0, -0.5, math.pi),))
    np.testing.assert_allclose(bending_coordinates(robot, mirrored), [1.0, 5.0, 0.0], atol=1e-12)
    assert config_steps(robot, [a, b])[0] == pytest.approx(5.0 * math.sqrt(2))
    assert smoothness_ratio(robot, [a, a, a]) == 1.0
    assert smoothness_ratio(robot, [a, b, b, b]) == math.inf
    assert smoothness_ratio(robot, [a, b, a, b]) == pytest.approx(1.0)


def test_planar_bending_coordinates():
    cfg = planar_cfg([0.1, -0.2, 0.0, 0.3])
    np.testing.assert_allclose(bending_coordinates(PLANAR4, cfg).reshape(4, 2)[:, 1],
                               64.4 * np.array([0.1, -0.2, 0.0, 0.3]))


# ------------------------------------------------------------ properties

reachable = st.tuples(st.floats(-12.0, 32.0), st.floats(0.02, 3.0), st.floats(-3.1, 3.1))


@settings(max_examples=80, deadline=None)
@given(reachable)
def test_oracle_equivalence(values):
    dl, th, ph = values
    target = arc_endpoint(SPEC.rest_length + dl, th, ph)
    res = solve_point(SINGLE, target)
    assert res.residual <= 1e-6
    c = res.config[0]
    assert c.delta_l == pytest.approx(dl, abs=1e-5)
    assert c.theta == pytest.approx(th, abs=1e-5)
    assert abs((c.phi - ph + math.pi) % (2 * math.pi) - math.pi) <= 1e-5
    assert_within_bounds(SINGLE, res.config)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-200, 200), min_size=3, max_size=3), st.lists(reachable, min_size=2, max_size=2))
def test_feasibility_and_descent(target, warm):
    robot = RobotSpec.uniform(2, links=4)
    start = ConfigVector(tuple(SegmentConfig(*w) for w in warm))
    res = solve_point(robot, target, start)
    assert_within_bounds(robot, res.config)
    assert res.residual >= 0
    assert res.objective <= res.warm_objective + 1e-12
    if res.status == CONVERGED:
        assert res.residual <= IkSettings().position_tolerance


@settings(max_examples=25, deadline=None)
@given(st.floats(-60.0, 60.0), st.floats(0.0, 0.6))
def test_planar_secondary_priority(x, angle):
    task = SecondaryTask.tip_angle(angle)
    res = solve_point(PLANAR4, [x, 150.0], task=task)
    assert res.residual <= IkSettings().position_tolerance
    if res.status == CONVERGED:
        assert res.secondary_residual <= 1e-4


def test_trajectory_warm_start_order():
    traj = generate("circle3d", 40)
    res = solve_trajectory(SINGLE, traj)
    assert len(res) == len(traj)
    assert all(r.status == CONVERGED for r in res)
    assert smoothness_ratio(SINGLE, [r.config for r in res]) <= 10
    assert NO_TASK.kind == "none"


def test_on_axis_target_escapes_straight_saddle():
    # from the straight start every bending gradient is zero for an on-axis target
    res = solve_point(PLANAR4, [0.0, 150.0])
    assert res.status == CONVERGED
    assert res.residual <= 1e-6

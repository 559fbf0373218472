import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pccik.trajectory import SHAPES, Trajectory, generate, read_csv, resample, write_csv


def test_shape_start_points():
    np.testing.assert_allclose(generate("circle2d", 10).points[0], [225, 100], atol=1e-12)
    np.testing.assert_allclose(generate("circle3d", 10).points[0], [20, 0, 60], atol=1e-12)
    np.testing.assert_allclose(generate("flower", 10).points[0], [55, 0, 60], atol=1e-12)


def test_circle3d_natural_period_and_formula():
    traj = generate("circle3d", 101)
    assert traj.duration == pytest.approx(2 * math.pi / 6)
    t = traj.times
    np.testing.assert_allclose(traj.points, np.column_stack([20 * np.cos(6 * t), 20 * np.sin(6 * t),
                                                             np.full_like(t, 60)]), atol=1e-12)


def test_flower_formula():
    traj = generate("flower", 57)
    s = traj.times  # default duration makes time equal to the shape parameter
    rho = 40 + 15 * np.cos(4 * s)
    np.testing.assert_allclose(traj.points[:, 0], rho * np.cos(s), atol=1e-12)
    np.testing.assert_allclose(traj.points[:, 1], rho * np.sin(s), atol=1e-12)
    assert traj.characteristic_radius == 40


@pytest.mark.parametrize("shape", SHAPES)
def test_periodic_shapes_close(shape):
    traj = generate(shape, 200)
    np.testing.assert_allclose(traj.points[0], traj.points[-1], atol=1e-9)


def test_circle2d_radius_exact():
    traj = generate("circle2d", 999)
    d = np.hypot(traj.points[:, 0] - 175, traj.points[:, 1] - 100)
    assert np.max(np.abs(d - 50)) <= 1e-12
    assert traj.planar and traj.characteristic_radius == 50


def test_generate_errors():
    with pytest.raises(ValueError):
        generate("square", 10)
    with pytest.raises(ValueError):
        generate("circle2d", 1)
    with pytest.raises(ValueError):
        generate("circle2d", 10, radius=0)
    with pytest.raises(ValueError):
        generate("flower", 10, spin=3)
    with pytest.raises(ValueError):
        generate("flower", 10, duration=-1)


def test_custom_duration_and_params():
    traj = generate("flower", 11, duration=5.0, z0=100.0)
    assert traj.times[-1] == 5.0
    assert np.all(traj.points[:, 2] == 100.0)


def test_trajectory_invariants():
    with pytest.raises(ValueError):
        Trajectory([0.0], [[0, 0, 0]])
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [[0, 0, 0], [1, 1, 1]])
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], [[0, 0, 0, 0], [1, 1, 1, 1]])


def test_resample_identity():
    line = Trajectory([0.0, 1.0, 2.0], [[0, 0, 0], [1, 0, 0], [2, 0, 0]])
    np.testing.assert_allclose(resample(line, 3).points, line.points, atol=1e-12)


def test_resample_midpoint():
    seg = Trajectory([0.0, 2.0], [[0, 0, 0], [4, 2, 0]])
    r = resample(seg, 3)
    np.testing.assert_allclose(r.points[1], [2, 1, 0], atol=1e-12)
    assert r.times[1] == pytest.approx(1.0)


def test_resample_circle_sagitta_bound():
    r = resample(generate("circle2d", 1000), 1150)
    d = np.hypot(r.points[:, 0] - 175, r.points[:, 1] - 100)
    assert np.max(50 - d) <= (2 * math.pi * 50 / 999) ** 2 / (8 * 50)  # 999 intervals
    np.testing.assert_array_equal(r.points[0], [225, 100])
    assert len(r) == 1150


def test_resample_errors():
    with pytest.raises(ValueError):
        resample(Trajectory([0.0, 1.0], [[1, 1, 1], [1, 1, 1]]), 5)
    with pytest.raises(ValueError):
        resample(generate("flower", 10), 1)


@pytest.mark.parametrize("shape", SHAPES)
def test_csv_round_trip(tmp_path, shape):
    traj = generate(shape, 33)
    path = tmp_path / "t.csv"
    write_csv(traj, path)
    back = read_csv(path)
    np.testing.assert_array_equal(back.times, traj.times)
    np.testing.assert_array_equal(back.points, traj.points)
    assert back.characteristic_radius is None


def test_read_csv_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError):
        read_csv(empty)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_csv(bad)
    flat = tmp_path / "flat.csv"
    flat.write_text("t,x,y\n0,1,2\n1,2,3\n")
    with pytest.raises(ValueError):
        read_csv(flat, planar=False)
    full = tmp_path / "full.csv"
    full.write_text("t,x,y,z\n0,1,2,3\n1,2,3,4\n")
    np.testing.assert_array_equal(read_csv(full, planar=True).points, [[1, 2], [2, 3]])


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(2, 400))
def test_times_strictly_increasing(shape, n):
    traj = generate(shape, n)
    assert len(traj) == n
    assert np.all(np.diff(traj.times) > 0)

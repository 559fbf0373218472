from pathlib import Path

import pytest

from pccik.config import (
    PRESET_NAMES,
    ConfigError,
    dump_robot,
    load_robot,
    parse_robot,
    preset,
)

ROBOTS = Path(__file__).resolve().parents[1] / "robots"

MINIMAL = """
[robot]
segments = 2
gravity_mm_s2 = 0, 0, -9810

[segment]
rest_length_mm = 50
links = 8     ; shared

[segment.2]
links = 4
mass_g = 10

[damping]
r = 0.1 0.2 0.3 0.1 0.2 0.3
"""


def test_parse_minimal():
    cfg = parse_robot(MINIMAL, "m")
    r = cfg.robot
    assert r.n_segments == 2
    assert [s.links for s in r.segments] == [8, 4]
    assert r.segments[0].rest_length == 50
    assert r.masses[1] == 10
    assert r.segments[0].delta_l_bounds == (-10.0, 25.0)
    assert cfg.dynamics.damping.r == (0.1, 0.2, 0.3, 0.1, 0.2, 0.3)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_round_trip(name):
    cfg = preset(name)
    assert parse_robot(dump_robot(cfg), name) == cfg


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_shipped_files_match_presets(name):
    assert load_robot(ROBOTS / f"{name}.ini") == preset(name)


@pytest.mark.parametrize("text", [
    "[segment]\nlinks = 3\n",
    "[robot]\nsegments = 0\n",
    "[robot]\nwheels = 4\n",
    "[robot]\n[segment]\nstiffness = 3\n",
    "[robot]\n[segment.2]\nlinks = 3\n",
    "[robot]\n[extras]\n",
    "[robot]\ngravity_mm_s2 = 1, 2\n",
    "[robot]\n[segment]\nlinks = zero\n",
    "[robot]\n[stiffness]\na9 = 1\n",
    "[robot]\n[actuation]\nbellows = 2\n",
    "not an ini file",
])
def test_bad_files(text):
    with pytest.raises(ConfigError):
        parse_robot(text)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_robot(tmp_path / "missing.ini")
    with pytest.raises(ConfigError):
        preset("octopus")


def test_preset_shapes():
    assert preset("single").robot.n_segments == 1
    assert preset("two").robot.n_segments == 2
    p4 = preset("planar4")
    assert p4.robot.planar and p4.robot.n_segments == 4
    # the planar arm works in the x-z plane, so gravity is along y
    assert p4.robot.gravity == (0.0, -9810.0, 0.0)

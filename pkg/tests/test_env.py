import json

import numpy as np
import pytest

from src.env import (
    Bounds, BoundaryPolyline, Obstacle, build_channel_boundaries, coverage_error, interface_levels,
    load_environment, load_environment_file, serialize_environment,
)
from src.errors import ValidationError


def _square(x0, y0, side=1.0):
    return np.array([[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]])


def test_empty_rectangle_single_channel(empty_doc):
    space, layout = load_environment(empty_doc)
    assert space.p == 1 and layout.p == 1
    ch = space.channels[0]
    np.testing.assert_array_equal(ch.bottom.points, [[0, 0], [10, 0]])
    np.testing.assert_array_equal(ch.right.points, [[10, 0], [10, 4]])
    np.testing.assert_array_equal(ch.top.points, [[0, 4], [10, 4]])
    np.testing.assert_array_equal(ch.left.points, [[0, 0], [0, 4]])
    assert not any(pl.obstacle_flags.any() for pl in ch.sides)
    assert ch.is_closed()
    assert ch.area == pytest.approx(40.0)


def test_interfaces_without_obstacles_are_straight():
    b = Bounds(0.0, 10.0, 0.0, 6.0)
    channels = build_channel_boundaries(b, [], [0.0, 1.0, 2.0])
    assert len(channels) == 2
    assert channels[0].top.segment_count == 1
    np.testing.assert_array_equal(channels[0].top.points, [[0, 3], [10, 3]])
    assert not channels[0].top.obstacle_flags.any()
    np.testing.assert_array_equal(channels[1].bottom.points, channels[0].top.points)


def test_square_on_interface_detours_lower_half():
    b = Bounds(0.0, 10.0, 0.0, 6.0)
    ob = Obstacle(_square(4.0, 2.5), 1)
    ch1, ch2 = build_channel_boundaries(b, [ob], [0.0, 1.0, 2.0])

    np.testing.assert_allclose(ch1.top.points, [[0, 3], [4, 3], [4, 2.5], [5, 2.5], [5, 3], [10, 3]])
    assert ch1.top.obstacle_flags.tolist() == [False, True, True, True, False]
    np.testing.assert_allclose(ch2.bottom.points, [[0, 3], [4, 3], [4, 3.5], [5, 3.5], [5, 3], [10, 3]])
    assert ch2.bottom.obstacle_flags.tolist() == [False, True, True, True, False]


def test_two_squares_in_one_group():
    b = Bounds(0.0, 10.0, 0.0, 6.0)
    obs = [Obstacle(_square(6.0, 2.5), 1), Obstacle(_square(2.0, 2.5), 1)]
    ch1, _ = build_channel_boundaries(b, obs, [0.0, 1.0, 2.0])
    flags = ch1.top.obstacle_flags.tolist()
    assert flags == [False, True, True, True, False, True, True, True, False]
    # detours are sorted left to right
    assert ch1.top.points[1, 0] == 2.0 and ch1.top.points[5, 0] == 6.0


def test_benchmark_has_five_channels(benchmark_env):
    space, layout = load_environment_file(benchmark_env)
    assert space.p == 5
    assert layout.m_psi == 60 and layout.m_phi == 101
    assert [len(g.obstacle_indices) for g in space.groups] == [2, 2, 2, 2]
    for g in space.groups:
        for i in g.obstacle_indices:
            flagged_below = space.channels[g.index - 1].top.obstacle_flags.sum()
            flagged_above = space.channels[g.index].bottom.obstacle_flags.sum()
            assert space.obstacles[i].group_index == g.index
            assert flagged_below == flagged_above == 6
    assert coverage_error(space) < 1e-12


def test_group_index_out_of_range(two_channel_doc):
    two_channel_doc["obstacles"][0]["group"] = 2
    with pytest.raises(ValidationError, match="group index out of range"):
        load_environment(two_channel_doc)


def test_obstacle_not_straddling_interface(two_channel_doc):
    two_channel_doc["obstacles"][0]["polygon"] = [[8, 1], [12, 1], [12, 2], [8, 2]]
    with pytest.raises(ValidationError, match="does not straddle"):
        load_environment(two_channel_doc)


def test_overlapping_obstacles_in_group(two_channel_doc):
    two_channel_doc["obstacles"].append(
        {"group": 1, "polygon": [[11, 3], [14, 3], [14, 5], [11, 5]]})
    with pytest.raises(ValidationError, match="overlap in x"):
        load_environment(two_channel_doc)


def test_clockwise_obstacle_is_reversed(two_channel_doc, capsys):
    two_channel_doc["obstacles"][0]["polygon"] = [[8, 3], [8, 5], [12, 5], [12, 3]]
    space, _ = load_environment(two_channel_doc)
    assert space.obstacles[0].area > 0.0
    assert "reversed" in capsys.readouterr().out


def test_missing_field_names_key(empty_doc):
    del empty_doc["bounds"]
    with pytest.raises(ValidationError, match="'bounds'"):
        load_environment(empty_doc)


def test_zero_length_segment_rejected():
    with pytest.raises(ValidationError, match="zero length"):
        BoundaryPolyline(np.array([[0, 0], [0, 0], [1, 0]], dtype=float), None)


def test_explicit_channels_roundtrip(two_channel_doc):
    space, layout = load_environment(two_channel_doc)
    doc = json.loads(json.dumps(serialize_environment(space, layout)))
    space2, layout2 = load_environment(doc)
    assert layout2 == layout
    for a, b in zip(space.channels, space2.channels):
        for pa, pb in zip(a.sides, b.sides):
            np.testing.assert_array_equal(pa.points, pb.points)
            np.testing.assert_array_equal(pa.obstacle_flags, pb.obstacle_flags)


def test_open_channel_loop_rejected(two_channel_doc):
    space, layout = load_environment(two_channel_doc)
    doc = serialize_environment(space, layout)
    doc["channels"][0]["right"]["points"][0] = [20.0, 0.5]
    with pytest.raises(ValidationError, match="open"):
        load_environment(doc)


def test_flag_off_obstacle_rejected(two_channel_doc):
    space, layout = load_environment(two_channel_doc)
    doc = serialize_environment(space, layout)
    doc["channels"][0]["top"]["obstacle_flags"][0] = True
    with pytest.raises(ValidationError, match="not on an obstacle edge"):
        load_environment(doc)


def test_interface_override():
    b = Bounds(0.0, 10.0, 0.0, 6.0)
    assert interface_levels(b, [0.0, 1.0, 2.0]) == [0.0, 3.0, 6.0]
    assert interface_levels(b, [0.0, 1.0, 2.0], [2.0]) == [0.0, 2.0, 6.0]
    with pytest.raises(ValidationError):
        interface_levels(b, [0.0, 1.0, 2.0], [7.0])


def test_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        load_environment_file(str(tmp_path / "nope.json"))

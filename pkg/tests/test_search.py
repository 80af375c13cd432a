import math

import numpy as np
import pytest

from src.atlas import NodeId, atlas_from_positions, neighbors, stitch_channels
from src.env import Bounds, MotionSpace, Obstacle, load_environment, load_environment_file
from src.errors import SolverError, ValidationError
from src.mesh_gen import solve_channels
from src.search import (
    OccupancyGrid, PathQuery, PlanningConfig, astar_motion_space_baseline, astar_occupancy,
    astar_planning_space, compare_planners, dijkstra_atlas_cost, dijkstra_cost, distance_field,
    path_length, rasterize_occupancy, snap_to_node,
)
from src.utils.geometry import points_in_polygon

from conftest import BENCHMARK_ENV, BENCHMARK_GOAL, BENCHMARK_START


def _lattice(m_psi, m_phi, h=1.0):
    R, C = np.meshgrid(np.arange(m_psi), np.arange(m_phi), indexing="ij")
    return np.stack([C * h, R * h], axis=-1).astype(float)


def _random_atlas(rng, n=20, interface_rows=(5, 10, 15), p_forbid=0.3):
    pos = _lattice(n, n) + rng.uniform(-0.3, 0.3, size=(n, n, 2))
    forbidden = np.zeros((n, n), dtype=bool)
    for r in interface_rows:
        forbidden[r] = rng.random(n) < p_forbid
    return atlas_from_positions(pos, forbidden, interface_rows)


def _free_node(rng, atlas):
    free = np.argwhere(~atlas.forbidden)
    r, c = free[rng.integers(len(free))]
    return NodeId(int(r), int(c))


@pytest.fixture(scope="module")
def benchmark():
    space, layout = load_environment_file(BENCHMARK_ENV)
    atlas = stitch_channels(solve_channels(space, layout, progress=False))
    return space, atlas


# --- path length ---

def test_path_length_examples():
    assert path_length([(1.0, 2.0)]) == 0.0
    assert path_length([(0.0, 0.0), (3.0, 4.0)]) == 5.0
    with pytest.raises(ValidationError):
        path_length([])


# --- snapping ---

def test_snap_exact_and_tie():
    atlas = atlas_from_positions(_lattice(4, 4))
    assert snap_to_node(atlas, (2.0, 1.0)) == (1, 2)
    # equidistant from (0,0),(0,1),(1,0),(1,1)
    assert snap_to_node(atlas, (0.5, 0.5)) == (0, 0)
    assert snap_to_node(atlas, (1.5, 0.0)) == (0, 1)


def test_snap_skips_forbidden_nodes():
    rng = np.random.default_rng(3)
    atlas = _random_atlas(rng, n=10, interface_rows=(5,), p_forbid=0.6)
    for _ in range(50):
        p = rng.uniform(0, 9, size=2)
        got = snap_to_node(atlas, p)
        best, best_d = None, math.inf
        for r in range(atlas.m_psi):
            for c in range(atlas.m_phi):
                if atlas.forbidden[r, c]:
                    continue
                d = math.hypot(*(atlas.below[r, c] - p))
                if d < best_d:
                    best, best_d = (r, c), d
        assert tuple(got) == best


# --- sandwich A* ---

def test_start_equals_goal():
    atlas = atlas_from_positions(_lattice(5, 5))
    path = astar_planning_space(atlas, PathQuery((2.0, 2.0), (2.0, 2.0)))
    assert path.nodes == ((2, 2),)
    assert path.length == 0.0


def test_straight_line_on_lattice():
    atlas = atlas_from_positions(_lattice(6, 3))
    path = astar_planning_space(atlas, PathQuery((0.0, 0.0), (0.0, 5.0)))
    assert path.length == pytest.approx(5.0)
    assert [n[1] for n in path.nodes] == [0] * 6


@pytest.mark.parametrize("seed", range(100))
def test_sandwich_cost_matches_dijkstra(seed):
    rng = np.random.default_rng(seed)
    atlas = _random_atlas(rng)
    start, goal = _free_node(rng, atlas), _free_node(rng, atlas)
    ref = dijkstra_atlas_cost(atlas, start, goal)
    query = PathQuery(tuple(atlas.below[start]), tuple(atlas.below[goal]))
    if math.isinf(ref):
        with pytest.raises(SolverError, match="no path"):
            astar_planning_space(atlas, query)
        return
    path = astar_planning_space(atlas, query)
    assert path.nodes[0] == start and path.nodes[-1] == goal
    assert path.cost == pytest.approx(ref, abs=1e-9)
    assert path.length == pytest.approx(path.cost, abs=1e-9)
    assert not any(atlas.forbidden[r, c] for r, c in path.nodes)


@pytest.mark.parametrize("seed", range(20))
def test_euclidean_heuristic_never_overestimates(seed):
    rng = np.random.default_rng(seed)
    atlas = _random_atlas(rng)
    goal = _free_node(rng, atlas)
    dist = distance_field(goal, lambda node: neighbors(atlas, node))
    assert dist[tuple(goal)] == 0.0
    gx, gy = atlas.below[goal]
    for (r, c), d in dist.items():
        assert math.hypot(gx - atlas.below[r, c, 0], gy - atlas.below[r, c, 1]) <= d + 1e-12
        # the field agrees with a point-to-point search
        if (r + c) % 17 == 0:
            assert dijkstra_atlas_cost(atlas, (r, c), goal) == pytest.approx(d, abs=1e-9)


def test_heuristic_on_stitched_atlas(two_channel_doc):
    space, layout = load_environment(two_channel_doc)
    atlas = stitch_channels(solve_channels(space, layout, progress=False))
    goal = (0, 0)
    dist = distance_field(goal, lambda node: neighbors(atlas, node))
    assert len(dist) == int((~atlas.forbidden).sum())
    for (r, c), d in dist.items():
        # interface sides may differ by up to epsilon at free nodes
        assert math.hypot(*(atlas.below[r, c] - atlas.below[goal])) <= d + 4 * atlas.epsilon


@pytest.mark.parametrize("seed", range(10))
def test_sandwich_search_is_repeatable(seed):
    rng = np.random.default_rng(seed)
    atlas = _random_atlas(rng, p_forbid=0.1)
    start, goal = _free_node(rng, atlas), _free_node(rng, atlas)
    query = PathQuery(tuple(atlas.below[start]), tuple(atlas.below[goal]))
    first = astar_planning_space(atlas, query)
    second = astar_planning_space(atlas, query)
    assert first.nodes == second.nodes
    assert first.expanded == second.expanded
    assert first.cost == second.cost
    np.testing.assert_array_equal(first.points, second.points)


def test_no_path_through_fully_forbidden_interface():
    forbidden = np.zeros((5, 5), dtype=bool)
    forbidden[2] = True
    atlas = atlas_from_positions(_lattice(5, 5), forbidden, interface_rows=[2])
    with pytest.raises(SolverError, match="sandwich A\\*: no path") as info:
        astar_planning_space(atlas, PathQuery((0.0, 0.0), (4.0, 4.0)))
    assert info.value.diagnostics["planner"] == "sandwich"


# --- occupancy baseline ---

def test_rasterize_empty(empty_doc):
    space, _ = load_environment(empty_doc)
    grid = rasterize_occupancy(space, 0.5)
    assert grid.shape == (8, 20)
    assert not grid.blocked.any()


def test_rasterize_unit_square():
    square = np.array([[2.0, 1.0], [3.0, 1.0], [3.0, 2.0], [2.0, 2.0]])
    space = MotionSpace(Bounds(0.0, 5.0, 0.0, 4.0), (Obstacle(square, 1),), (), ())
    grid = rasterize_occupancy(space, 0.5)
    oracle = points_in_polygon(grid.centers().reshape(-1, 2), square).reshape(grid.shape)
    np.testing.assert_array_equal(grid.blocked, oracle)
    assert np.argwhere(grid.blocked).tolist() == [[2, 4], [2, 5], [3, 4], [3, 5]]


def test_raster_stays_inside_bounds():
    space = MotionSpace(Bounds(0.0, 10.2, 0.0, 4.0), (), (), ())
    grid = rasterize_occupancy(space, 0.5)
    assert grid.shape == (8, 20)
    centers = grid.centers()
    assert centers[..., 0].max() <= 10.2 and centers[..., 1].max() <= 4.0
    assert not grid.blocked.any()
    # the leftover strip belongs to the last column
    assert grid.cell_of((10.15, 2.0)) == (4, 19)
    path = astar_motion_space_baseline(grid, PathQuery((0.1, 2.0), (10.15, 2.0)))
    assert path.nodes[-1] == (4, 19)
    assert np.max(path.points[:, 0]) <= 10.2


def test_raster_cell_wider_than_space_is_blocked():
    grid = rasterize_occupancy(MotionSpace(Bounds(0.0, 0.2, 0.0, 4.0), (), (), ()), 0.5)
    assert grid.shape == (8, 1)
    assert grid.blocked.all()


def test_fully_blocked_space():
    cover = np.array([[-1.0, -1.0], [6.0, -1.0], [6.0, 5.0], [-1.0, 5.0]])
    space = MotionSpace(Bounds(0.0, 5.0, 0.0, 4.0), (Obstacle(cover, 1),), (), ())
    grid = rasterize_occupancy(space, 1.0)
    assert grid.blocked.all()
    with pytest.raises(SolverError, match="blocked"):
        astar_motion_space_baseline(grid, PathQuery((0.5, 0.5), (4.5, 3.5)))


def test_straight_corridor():
    grid = OccupancyGrid(0.0, 0.0, 0.5, np.zeros((2, 20), dtype=bool))
    path = astar_motion_space_baseline(grid, PathQuery((0.25, 0.25), (9.75, 0.25)))
    assert path.length == pytest.approx(9.5)
    assert {r for r, _ in path.nodes} == {0}


def test_wall_with_gap():
    blocked = np.zeros((10, 10), dtype=bool)
    blocked[:, 5] = True
    blocked[7, 5] = False
    grid = OccupancyGrid(0.0, 0.0, 1.0, blocked)
    path = astar_occupancy(grid, (1, 1), (1, 8))
    assert (7, 5) in path.nodes
    assert path.cost == pytest.approx(dijkstra_cost((1, 1), (1, 8), grid.neighbors), abs=1e-9)


@pytest.mark.parametrize("seed", range(100))
def test_baseline_cost_matches_dijkstra(seed):
    rng = np.random.default_rng(1000 + seed)
    grid = OccupancyGrid(0.0, 0.0, 0.5, rng.random((15, 15)) < 0.25)
    free = np.argwhere(~grid.blocked)
    start = tuple(int(v) for v in free[rng.integers(len(free))])
    goal = tuple(int(v) for v in free[rng.integers(len(free))])
    ref = dijkstra_cost(start, goal, grid.neighbors)
    if math.isinf(ref):
        with pytest.raises(SolverError, match="no path"):
            astar_occupancy(grid, start, goal)
        return
    assert astar_occupancy(grid, start, goal).cost == pytest.approx(ref, abs=1e-9)


# --- queries and comparison ---

def test_query_inside_obstacle(two_channel_doc):
    space, _ = load_environment(two_channel_doc)
    with pytest.raises(ValidationError, match="inside obstacle 0"):
        PathQuery((1.0, 1.0), (10.0, 4.0)).validate(space)
    with pytest.raises(ValidationError, match="outside the bounds"):
        PathQuery((-1.0, 1.0), (1.0, 1.0)).validate(space)


def test_benchmark_reduction(benchmark):
    space, atlas = benchmark
    cmp = compare_planners(space, atlas, PathQuery(BENCHMARK_START, BENCHMARK_GOAL), cell_size=0.5)
    assert cmp.sandwich.length < cmp.baseline.length
    assert 2.0 <= cmp.reduction_percent <= 12.0
    straight = math.hypot(BENCHMARK_GOAL[0] - BENCHMARK_START[0], BENCHMARK_GOAL[1] - BENCHMARK_START[1])
    assert cmp.sandwich.length >= straight - 1.0
    assert not any(atlas.forbidden[r, c] for r, c in cmp.sandwich.nodes)


def test_compare_start_equals_goal(benchmark):
    space, atlas = benchmark
    cmp = compare_planners(space, atlas, PathQuery((10.0, 2.0), (10.0, 2.0)), cell_size=0.5)
    assert cmp.report() == {"sandwich_length": 0.0, "baseline_length": 0.0, "reduction_percent": 0.0}


def test_planning_config():
    cfg = PlanningConfig.from_mapping({"planning": {"cell_size": 0.25}})
    assert cfg.cell_size == 0.25 and cfg.epsilon == 1e-6
    assert PlanningConfig.from_mapping({"planning": {"cell_size": None}}).cell_size is None
    with pytest.raises(ValueError):
        PlanningConfig.from_mapping({"planning": {"epsilon": -1}})

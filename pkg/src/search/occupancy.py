"""
Baseline planner: 8-connected A* over a rasterized motion space.
"""
from __future__ import annotations
import math
import numpy as np
from dataclasses import dataclass
from typing import List, Tuple

from src.env import MotionSpace
from src.errors import SolverError, ValidationError
from src.utils.geometry import points_in_polygon
from .astar import best_first_search
from .path import PathQuery, PlannedPath, path_from_points

_MOVES = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    x0: float
    y0: float
    cell_size: float
    blocked: np.ndarray   # (n_rows, n_cols) bool, row = y index

    def __post_init__(self):
        b = np.array(self.blocked, dtype=bool)
        b.setflags(write=False)
        object.__setattr__(self, "blocked", b)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.blocked.shape

    def center(self, row: int, col: int) -> np.ndarray:
        return np.array([self.x0 + (col + 0.5) * self.cell_size, self.y0 + (row + 0.5) * self.cell_size])

    def centers(self) -> np.ndarray:
        n_rows, n_cols = self.shape
        xs = self.x0 + (np.arange(n_cols) + 0.5) * self.cell_size
        ys = self.y0 + (np.arange(n_rows) + 0.5) * self.cell_size
        X, Y = np.meshgrid(xs, ys)
        return np.stack([X, Y], axis=-1)

    def cell_of(self, point) -> Tuple[int, int]:
        n_rows, n_cols = self.shape
        col = int(np.clip(math.floor((point[0] - self.x0) / self.cell_size), 0, n_cols - 1))
        row = int(np.clip(math.floor((point[1] - self.y0) / self.cell_size), 0, n_rows - 1))
        return row, col

    def neighbors(self, node) -> List[Tuple[Tuple[int, int], float]]:
        r, c = node
        n_rows, n_cols = self.shape
        out = []
        for dr, dc in _MOVES:
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < n_rows and 0 <= c2 < n_cols and not self.blocked[r2, c2]:
                cost = self.cell_size * (math.sqrt(2.0) if dr and dc else 1.0)
                out.append(((r2, c2), cost))
        return out


def rasterize_occupancy(space: MotionSpace, cell_size: float) -> OccupancyGrid:
    """
    Cell blocked iff its center lies inside an obstacle (boundary inclusive).

    The raster holds one cell per center that falls inside the bounds, so a
    leftover strip narrower than half a cell joins the last row or column.
    """
    if not cell_size > 0:
        raise ValidationError(f"cell_size must be > 0 (got {cell_size})")
    b = space.bounds
    n_cols = max(1, int(math.floor(b.width / cell_size + 0.5 + 1e-9)))
    n_rows = max(1, int(math.floor(b.height / cell_size + 0.5 + 1e-9)))
    grid = OccupancyGrid(b.xmin, b.ymin, float(cell_size), np.zeros((n_rows, n_cols), dtype=bool))
    centers = grid.centers().reshape(-1, 2)
    # a single cell wider than the space keeps its center outside
    blocked = (centers[:, 0] > b.xmax + 1e-9) | (centers[:, 1] > b.ymax + 1e-9)
    for ob in space.obstacles:
        blocked |= points_in_polygon(centers, ob.polygon, include_boundary=True)
    grid = OccupancyGrid(b.xmin, b.ymin, float(cell_size), blocked.reshape(n_rows, n_cols))
    print(f"[search] Occupancy raster {n_rows} x {n_cols} (cell {cell_size:.4g} m), "
          f"{int(grid.blocked.sum())} blocked.")
    return grid


def astar_occupancy(grid: OccupancyGrid, start_cell, goal_cell) -> PlannedPath:
    for name, cell in (("start", start_cell), ("goal", goal_cell)):
        if grid.blocked[cell[0], cell[1]]:
            raise SolverError(f"baseline A*: {name} cell {tuple(cell)} is blocked",
                              diagnostics={"planner": "baseline", "expanded": 0})
    goal_c = grid.center(*goal_cell)

    def h(node) -> float:
        p = grid.center(*node)
        return math.hypot(goal_c[0] - p[0], goal_c[1] - p[1])

    nodes, cost, expanded = best_first_search(tuple(start_cell), tuple(goal_cell), grid.neighbors, h)
    if nodes is None:
        raise SolverError(
            f"baseline A*: no path from {tuple(start_cell)} to {tuple(goal_cell)} ({expanded} nodes expanded)",
            diagnostics={"planner": "baseline", "expanded": expanded},
        )
    points = np.array([grid.center(r, c) for r, c in nodes])
    return path_from_points(nodes, points, expanded=expanded, solver="baseline_astar", cost=cost)


def astar_motion_space_baseline(grid: OccupancyGrid, query: PathQuery) -> PlannedPath:
    path = astar_occupancy(grid, grid.cell_of(query.start), grid.cell_of(query.goal))
    print(f"[search] baseline A*: {len(path)} waypoints, length {path.length:.4f} m, {path.expanded} expanded.")
    return path

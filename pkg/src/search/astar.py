"""
Best-first search over the planning atlas ("sandwich A*") and a Dijkstra
reference, sharing one generic core.
"""
from __future__ import annotations
import heapq
import math
import numpy as np
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple

from src.atlas import NodeId, PlanningAtlas, neighbors
from src.errors import SolverError, ValidationError
from .path import PathQuery, PlannedPath, path_from_points

Node = Tuple[int, int]
NeighborFn = Callable[[Node], Iterable[Tuple[Node, float]]]


def best_first_search(start: Node, goal: Node, neighbor_fn: NeighborFn,
                      heuristic: Callable[[Node], float]) -> Tuple[Optional[List[Node]], float, int]:
    """
    A* with heap key (f, h, row, col).

    Returns (node list or None, cost, expanded count). With heuristic = 0 this
    is Dijkstra.
    """
    start, goal = tuple(start), tuple(goal)
    g: Dict[Hashable, float] = {start: 0.0}
    parent: Dict[Hashable, Optional[Node]] = {start: None}
    closed = set()
    h0 = heuristic(start)
    heap = [(h0, h0, start[0], start[1])]
    expanded = 0

    while heap:
        f, h, r, c = heapq.heappop(heap)
        node = (r, c)
        if node in closed:
            continue
        closed.add(node)
        expanded += 1
        if node == goal:
            path = [node]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            path.reverse()
            return path, g[node], expanded
        g_node = g[node]
        for nb, cost in neighbor_fn(node):
            nb = tuple(nb)
            if nb in closed:
                continue
            g_new = g_node + cost
            if g_new < g.get(nb, math.inf):
                g[nb] = g_new
                parent[nb] = node
                h_nb = heuristic(nb)
                heapq.heappush(heap, (g_new + h_nb, h_nb, nb[0], nb[1]))

    return None, math.inf, expanded


def snap_to_node(atlas: PlanningAtlas, position) -> NodeId:
    """Nearest non-forbidden node; ties go to the smaller row, then column."""
    p = np.asarray(position, dtype=float)
    d_below = np.hypot(atlas.below[..., 0] - p[0], atlas.below[..., 1] - p[1])
    d_above = np.hypot(atlas.above[..., 0] - p[0], atlas.above[..., 1] - p[1])
    d = np.minimum(d_below, d_above)
    d = np.where(atlas.forbidden, np.inf, d)
    if not np.isfinite(d).any():
        raise SolverError("atlas has no non-forbidden node")
    # argmin returns the first minimum in row-major order
    r, c = np.unravel_index(int(np.argmin(d)), d.shape)
    return NodeId(int(r), int(c))


def _euclidean_to(atlas: PlanningAtlas, goal: Node) -> Callable[[Node], float]:
    gx, gy = atlas.below[goal[0], goal[1]]

    def h(node: Node) -> float:
        x, y = atlas.below[node[0], node[1]]
        return math.hypot(gx - x, gy - y)
    return h


def _atlas_neighbors(atlas: PlanningAtlas) -> NeighborFn:
    return lambda node: neighbors(atlas, node)


def astar_planning_space(atlas: PlanningAtlas, query: PathQuery) -> PlannedPath:
    start = snap_to_node(atlas, query.start)
    goal = snap_to_node(atlas, query.goal)
    nodes, cost, expanded = best_first_search(start, goal, _atlas_neighbors(atlas), _euclidean_to(atlas, goal))
    if nodes is None:
        raise SolverError(
            f"sandwich A*: no path from {tuple(start)} to {tuple(goal)} ({expanded} nodes expanded)",
            diagnostics={"planner": "sandwich", "expanded": expanded},
        )
    ids = [NodeId(r, c) for r, c in nodes]
    points = np.array([atlas.below[r, c] for r, c in ids])
    path = path_from_points(ids, points, expanded=expanded, solver="sandwich_astar", cost=cost)
    print(f"[search] sandwich A*: {len(ids)} waypoints, length {path.length:.4f} m, {expanded} expanded.")
    return path


def dijkstra_cost(start: Node, goal: Node, neighbor_fn: NeighborFn) -> float:
    """Reference shortest-path cost (inf when unreachable)."""
    _, cost, _ = best_first_search(start, goal, neighbor_fn, lambda _: 0.0)
    return cost


def dijkstra_atlas_cost(atlas: PlanningAtlas, start: Node, goal: Node) -> float:
    for node in (start, goal):
        if atlas.forbidden[node[0], node[1]]:
            raise ValidationError(f"node {tuple(node)} is forbidden")
    return dijkstra_cost(start, goal, _atlas_neighbors(atlas))


def distance_field(goal: Node, neighbor_fn: NeighborFn) -> Dict[Node, float]:
    """Exact cost-to-goal of every node reachable from goal (symmetric costs)."""
    goal = tuple(goal)
    dist: Dict[Node, float] = {goal: 0.0}
    heap = [(0.0, goal[0], goal[1])]
    done = set()
    while heap:
        d, r, c = heapq.heappop(heap)
        node = (r, c)
        if node in done:
            continue
        done.add(node)
        for nb, cost in neighbor_fn(node):
            nb = tuple(nb)
            nd = d + cost
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                heapq.heappush(heap, (nd, nb[0], nb[1]))
    return dist

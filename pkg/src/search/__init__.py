from .config import PlanningConfig
from .path import PathQuery, PlannedPath, path_from_points, path_length
from .astar import (
    astar_planning_space, best_first_search, dijkstra_atlas_cost, dijkstra_cost,
    distance_field, snap_to_node,
)
from .occupancy import OccupancyGrid, astar_motion_space_baseline, astar_occupancy, rasterize_occupancy
from .compare import PlannerComparison, compare_planners

__all__ = [
    "PlanningConfig", "PathQuery", "PlannedPath", "path_from_points", "path_length",
    "astar_planning_space", "best_first_search", "dijkstra_atlas_cost", "dijkstra_cost",
    "distance_field", "snap_to_node",
    "OccupancyGrid", "astar_motion_space_baseline", "astar_occupancy", "rasterize_occupancy",
    "PlannerComparison", "compare_planners",
]

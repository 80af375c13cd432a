from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Optional

from src.atlas import PlanningAtlas, min_node_spacing
from src.env import MotionSpace
from .astar import astar_planning_space
from .occupancy import OccupancyGrid, astar_motion_space_baseline, rasterize_occupancy
from .path import PathQuery, PlannedPath


@dataclass(frozen=True)
class PlannerComparison:
    sandwich: PlannedPath
    baseline: PlannedPath
    occupancy: OccupancyGrid

    @property
    def reduction_percent(self) -> float:
        if self.baseline.length == 0.0:
            return 0.0
        return 100.0 * (self.baseline.length - self.sandwich.length) / self.baseline.length

    def report(self) -> Dict[str, float]:
        return {
            "sandwich_length": float(self.sandwich.length),
            "baseline_length": float(self.baseline.length),
            "reduction_percent": float(self.reduction_percent),
        }


def compare_planners(space: MotionSpace, atlas: PlanningAtlas, query: PathQuery,
                     cell_size: Optional[float] = None) -> PlannerComparison:
    """Run both planners on one query; the raster defaults to the atlas node spacing."""
    query.validate(space)
    cs = float(cell_size) if cell_size is not None else min_node_spacing(atlas)
    sandwich = astar_planning_space(atlas, query)
    occupancy = rasterize_occupancy(space, cs)
    baseline = astar_motion_space_baseline(occupancy, query)
    result = PlannerComparison(sandwich, baseline, occupancy)
    print(f"[search] reduction {result.reduction_percent:.2f}% "
          f"({baseline.length:.3f} m -> {sandwich.length:.3f} m)")
    return result

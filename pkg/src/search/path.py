from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

from src.env import MotionSpace
from src.errors import ValidationError
from src.utils.geometry import points_in_polygon


@dataclass(frozen=True)
class PathQuery:
    start: Tuple[float, float]
    goal: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "start", (float(self.start[0]), float(self.start[1])))
        object.__setattr__(self, "goal", (float(self.goal[0]), float(self.goal[1])))

    def validate(self, space: MotionSpace) -> "PathQuery":
        """Both endpoints inside the bounds and outside every obstacle (boundary counts as inside)."""
        for name, pt in (("start", self.start), ("goal", self.goal)):
            if not all(np.isfinite(pt)):
                raise ValidationError(f"{name}: non-finite coordinate {pt}")
            if not space.bounds.contains(pt):
                raise ValidationError(f"{name} {pt} lies outside the bounds")
            for i, ob in enumerate(space.obstacles):
                if points_in_polygon(np.array([pt]), ob.polygon, include_boundary=True)[0]:
                    raise ValidationError(f"{name} {pt} lies inside obstacle {i}", index=i)
        return self


@dataclass(frozen=True, eq=False)
class PlannedPath:
    nodes: Tuple[Tuple[int, int], ...]   # (row, col) atlas nodes or occupancy cells
    points: np.ndarray                   # (N, 2) meters
    length: float
    expanded: int
    solver: str
    cost: float = float("nan")           # search cost, equals length up to interface epsilon

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "nodes", tuple((int(r), int(c)) for r, c in self.nodes))

    def __len__(self) -> int:
        return len(self.points)


def path_length(path: Union[PlannedPath, np.ndarray, Sequence]) -> float:
    pts = path.points if isinstance(path, PlannedPath) else np.asarray(path, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValidationError("path_length: empty path")
    if len(pts) == 1:
        return 0.0
    d = np.diff(pts, axis=0)
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


def path_from_points(nodes, points, expanded: int, solver: str, cost: float = float("nan")) -> PlannedPath:
    return PlannedPath(tuple(nodes), points, path_length(points), int(expanded), solver, float(cost))

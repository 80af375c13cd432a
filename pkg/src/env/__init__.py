from .motion_space import (
    Bounds, Obstacle, ObstacleGroup, BoundaryPolyline, NavigableChannel,
    MotionSpace, PlanningSpaceLayout, LOOP_TOL,
)
from .channels import build_channel_boundaries, interface_levels
from .loader import load_environment, load_environment_file, serialize_environment, coverage_error

__all__ = [
    "Bounds", "Obstacle", "ObstacleGroup", "BoundaryPolyline", "NavigableChannel",
    "MotionSpace", "PlanningSpaceLayout", "LOOP_TOL",
    "build_channel_boundaries", "interface_levels",
    "load_environment", "load_environment_file", "serialize_environment", "coverage_error",
]

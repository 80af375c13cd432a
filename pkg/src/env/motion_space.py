from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import Tuple

from src.errors import ValidationError
from src.utils.geometry import polygon_signed_area

LOOP_TOL = 1e-9


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned outer rectangle of the motion space (meters)."""
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValidationError(f"bounds: degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    def polygon(self) -> np.ndarray:
        return np.array([[self.xmin, self.ymin], [self.xmax, self.ymin],
                         [self.xmax, self.ymax], [self.xmin, self.ymax]], dtype=float)

    def contains(self, point) -> bool:
        x, y = float(point[0]), float(point[1])
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


@dataclass(frozen=True, eq=False)
class Obstacle:
    polygon: np.ndarray   # (N,2) counterclockwise, not closed
    group_index: int      # 1..p-1

    def __post_init__(self):
        object.__setattr__(self, "polygon", _frozen_array(self.polygon))

    @property
    def area(self) -> float:
        return polygon_signed_area(self.polygon)


@dataclass(frozen=True)
class ObstacleGroup:
    index: int                         # j: sandwiched by channels j and j+1
    obstacle_indices: Tuple[int, ...]  # positions in MotionSpace.obstacles


@dataclass(frozen=True, eq=False)
class BoundaryPolyline:
    """gamma serially connected segments through gamma+1 vertices."""
    points: np.ndarray          # (gamma+1, 2)
    obstacle_flags: np.ndarray  # (gamma,) bool, True where the segment lies on an obstacle

    def __post_init__(self):
        pts = _frozen_array(self.points)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValidationError(f"polyline: points must be (N,2), got shape {pts.shape}")
        if self.obstacle_flags is None:
            flags = np.zeros(max(len(pts) - 1, 0), dtype=bool)
        else:
            flags = np.array(self.obstacle_flags, dtype=bool).reshape(-1)
        flags.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "obstacle_flags", flags)

        if len(pts) < 2:
            raise ValidationError("polyline: needs at least one segment (gamma >= 1)")
        if len(flags) != len(pts) - 1:
            raise ValidationError(
                f"polyline: {len(pts) - 1} segments but {len(flags)} obstacle flags")
        seg = self.segment_lengths
        if np.any(seg <= 0.0):
            h = int(np.argmin(seg))
            raise ValidationError(f"polyline: segment {h} has zero length")

    @property
    def segment_count(self) -> int:
        return len(self.points) - 1

    @property
    def segment_lengths(self) -> np.ndarray:
        d = np.diff(self.points, axis=0)
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def cumulative_lengths(self) -> np.ndarray:
        """Lambda_0..Lambda_gamma, Lambda_0 = 0."""
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths)])

    @property
    def length(self) -> float:
        return float(np.sum(self.segment_lengths))

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]


@dataclass(frozen=True, eq=False)
class NavigableChannel:
    """Channel S_j bounded by bottom/right/top/left polylines.

    Orientation: bottom and top run left-to-right, right and left run bottom-to-top.
    """
    index: int
    bottom: BoundaryPolyline
    right: BoundaryPolyline
    top: BoundaryPolyline
    left: BoundaryPolyline

    @property
    def sides(self) -> Tuple[BoundaryPolyline, BoundaryPolyline, BoundaryPolyline, BoundaryPolyline]:
        return (self.bottom, self.right, self.top, self.left)

    def loop_gaps(self) -> Tuple[float, float, float, float]:
        """Distances between the four corner endpoints that must coincide."""
        def d(a, b):
            return float(np.hypot(*(np.asarray(a) - np.asarray(b))))
        return (
            d(self.bottom.end, self.right.start),
            d(self.right.end, self.top.end),
            d(self.top.start, self.left.end),
            d(self.left.start, self.bottom.start),
        )

    def is_closed(self, tol: float = LOOP_TOL) -> bool:
        return max(self.loop_gaps()) <= tol

    def polygon(self) -> np.ndarray:
        """Counterclockwise boundary loop (not closed)."""
        return np.vstack([
            self.bottom.points,
            self.right.points[1:],
            self.top.points[::-1][1:],
            self.left.points[::-1][1:-1],
        ])

    @property
    def area(self) -> float:
        return polygon_signed_area(self.polygon())


@dataclass(frozen=True)
class MotionSpace:
    bounds: Bounds
    obstacles: Tuple[Obstacle, ...]
    groups: Tuple[ObstacleGroup, ...]
    channels: Tuple[NavigableChannel, ...]   # bottom-to-top

    @property
    def p(self) -> int:
        return len(self.channels)


@dataclass(frozen=True)
class PlanningSpaceLayout:
    phi_min: float
    phi_max: float
    psi_levels: Tuple[float, ...]   # Psi_1 < ... < Psi_{p+1}
    m_phi: int
    m_rows: Tuple[int, ...]         # m_1..m_p, rows of each channel grid incl. both boundaries

    def __post_init__(self):
        object.__setattr__(self, "psi_levels", tuple(float(v) for v in self.psi_levels))
        object.__setattr__(self, "m_rows", tuple(int(v) for v in self.m_rows))
        if not self.phi_min < self.phi_max:
            raise ValidationError("layout: phi_min must be < phi_max")
        if len(self.psi_levels) < 2:
            raise ValidationError("layout: need at least two psi levels")
        if any(b <= a for a, b in zip(self.psi_levels, self.psi_levels[1:])):
            raise ValidationError("layout: psi_levels must be strictly increasing")
        if self.m_phi < 2:
            raise ValidationError("layout: m_phi must be >= 2")
        if len(self.m_rows) != len(self.psi_levels) - 1:
            raise ValidationError(
                f"layout: {len(self.m_rows)} row counts for {len(self.psi_levels) - 1} channels")
        for j, m in enumerate(self.m_rows, start=1):
            if m < 2:
                raise ValidationError(f"layout: channel {j} needs m_j >= 2 rows", index=j)

    @property
    def p(self) -> int:
        return len(self.m_rows)

    @property
    def m_psi(self) -> int:
        """Atlas rows; shared interface rows counted once."""
        return sum(self.m_rows) - (self.p - 1)

    def phi_values(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, self.m_phi)

    def psi_values(self, j: int) -> np.ndarray:
        """psi of each grid row of channel j (1-based)."""
        return np.linspace(self.psi_levels[j - 1], self.psi_levels[j], self.m_rows[j - 1])

    def row_offset(self, j: int) -> int:
        """Atlas row of channel j's bottom boundary (1-based j)."""
        return sum(m - 1 for m in self.m_rows[: j - 1])


__all__ = [
    "Bounds", "Obstacle", "ObstacleGroup", "BoundaryPolyline", "NavigableChannel",
    "MotionSpace", "PlanningSpaceLayout", "LOOP_TOL",
]

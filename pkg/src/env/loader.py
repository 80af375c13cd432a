"""
Environment document <-> MotionSpace + PlanningSpaceLayout.

Documents are JSON (or YAML) with:
    bounds: {xmin, xmax, ymin, ymax}
    obstacles: [{polygon: [[x, y], ...], group: int}]
    psi_levels: [...]
    phi_range: [min, max]
    grid: {m_phi: int, m_rows: [int, ...]}
    channels: optional [{bottom|right|top|left: {points, obstacle_flags}}]
    interfaces: optional [y_2 .. y_p] for the rectangle builder
"""
from __future__ import annotations
import os
import numpy as np
import yaml
from typing import Any, Dict, List, Mapping, Optional, Tuple

from src.errors import ValidationError
from src.utils.geometry import is_simple_polygon, point_segment_distance, polygon_signed_area
from .channels import build_channel_boundaries
from .motion_space import (
    LOOP_TOL, BoundaryPolyline, Bounds, MotionSpace, NavigableChannel, Obstacle,
    ObstacleGroup, PlanningSpaceLayout,
)

_SIDES = ("bottom", "right", "top", "left")


def _require(doc: Mapping[str, Any], key: str, where: str = "environment"):
    if not isinstance(doc, Mapping) or key not in doc:
        raise ValidationError(f"{where}: missing field '{key}'")
    return doc[key]


def _float_list(value, name: str) -> List[float]:
    if not isinstance(value, (list, tuple)):
        raise ValidationError(f"{name}: expected a list, got {type(value).__name__}")
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name}: non-numeric entry ({e})")


def _points(value, name: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)):
        raise ValidationError(f"{name}: expected a list of [x, y] pairs")
    try:
        arr = np.array([[float(a), float(b)] for a, b in value], dtype=float)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name}: malformed point list ({e})")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: non-finite coordinate")
    return arr


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ValidationError(f"{name}: expected an integer, got {value!r}")
    return int(value)


def _parse_bounds(doc) -> Bounds:
    raw = _require(doc, "bounds")
    try:
        return Bounds(*(float(_require(raw, k, "bounds")) for k in ("xmin", "xmax", "ymin", "ymax")))
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"bounds: {e}")


def _parse_layout(doc) -> PlanningSpaceLayout:
    psi = _float_list(_require(doc, "psi_levels"), "psi_levels")
    phi = _float_list(_require(doc, "phi_range"), "phi_range")
    if len(phi) != 2:
        raise ValidationError("phi_range: expected [min, max]")
    grid = _require(doc, "grid")
    m_phi = _int(_require(grid, "m_phi", "grid"), "grid.m_phi")
    rows = _require(grid, "m_rows", "grid")
    if not isinstance(rows, (list, tuple)):
        raise ValidationError("grid.m_rows: expected a list")
    m_rows = tuple(_int(v, f"grid.m_rows[{i}]") for i, v in enumerate(rows))
    return PlanningSpaceLayout(phi[0], phi[1], tuple(psi), m_phi, m_rows)


def _parse_obstacles(doc, p: int) -> Tuple[List[Obstacle], List[ObstacleGroup]]:
    raw = doc.get("obstacles", []) or []
    if not isinstance(raw, list):
        raise ValidationError("obstacles: expected a list")
    obstacles: List[Obstacle] = []
    for i, item in enumerate(raw):
        poly = _points(_require(item, "polygon", f"obstacle {i}"), f"obstacle {i}")
        group = _int(_require(item, "group", f"obstacle {i}"), f"obstacle {i}.group")
        if len(poly) < 3:
            raise ValidationError(f"obstacle {i}: needs at least 3 vertices", index=i)
        if not 1 <= group <= p - 1:
            raise ValidationError(f"obstacle {i}: group index out of range", index=i)
        if not is_simple_polygon(poly):
            raise ValidationError(f"obstacle {i}: polygon is not simple", index=i)
        if polygon_signed_area(poly) < 0.0:
            print(f"[env] obstacle {i}: clockwise polygon reversed to counterclockwise.")
            poly = poly[::-1].copy()
        obstacles.append(Obstacle(poly, group))

    groups = [
        ObstacleGroup(j, tuple(i for i, ob in enumerate(obstacles) if ob.group_index == j))
        for j in range(1, p)
    ]
    return obstacles, groups


def _parse_channels(raw, p: int) -> List[NavigableChannel]:
    if not isinstance(raw, list) or len(raw) != p:
        raise ValidationError(f"channels: expected {p} entries")
    channels: List[NavigableChannel] = []
    for j, entry in enumerate(raw, start=1):
        sides = []
        for side in _SIDES:
            side_doc = _require(entry, side, f"channel {j}")
            pts = _points(_require(side_doc, "points", f"channel {j}.{side}"), f"channel {j}.{side}")
            flags = side_doc.get("obstacle_flags") if isinstance(side_doc, Mapping) else None
            if flags is not None and not all(isinstance(f, bool) for f in flags):
                raise ValidationError(f"channel {j}.{side}: obstacle_flags must be booleans", index=j)
            try:
                sides.append(BoundaryPolyline(pts, flags))
            except ValidationError as e:
                raise ValidationError(f"channel {j}.{side}: {e}", index=j) from e
        channels.append(NavigableChannel(j, *sides))
    return channels


def _validate_space(space: MotionSpace) -> None:
    b = space.bounds
    for ch in space.channels:
        gaps = ch.loop_gaps()
        if max(gaps) > LOOP_TOL:
            raise ValidationError(
                f"channel {ch.index}: boundary loop is open (gap {max(gaps):.3e} m)", index=ch.index)
        for side, poly in zip(_SIDES, ch.sides):
            if not all(b.contains(pt) for pt in poly.points):
                raise ValidationError(f"channel {ch.index}.{side}: leaves the bounds", index=ch.index)
        if ch.bottom.points[0, 0] > ch.bottom.points[-1, 0] or ch.top.points[0, 0] > ch.top.points[-1, 0]:
            raise ValidationError(
                f"channel {ch.index}: bottom/top polylines must run left-to-right", index=ch.index)
        if ch.area <= 0.0:
            raise ValidationError(f"channel {ch.index}: boundary loop is not counterclockwise", index=ch.index)

    for i, ob in enumerate(space.obstacles):
        if not all(b.contains(pt) for pt in ob.polygon):
            raise ValidationError(f"obstacle {i}: lies outside the bounds", index=i)

    # flagged segments must lie on an obstacle edge
    for ch in space.channels:
        for side, poly in zip(_SIDES, ch.sides):
            for h in np.flatnonzero(poly.obstacle_flags):
                ends = poly.points[h:h + 2]
                if not any(_on_polygon(ends, ob.polygon) for ob in space.obstacles):
                    raise ValidationError(
                        f"channel {ch.index}.{side}: flagged segment {int(h)} is not on an obstacle edge",
                        index=ch.index)


def _on_polygon(points: np.ndarray, polygon: np.ndarray, tol: float = 1e-9) -> bool:
    n = len(polygon)
    for e in range(n):
        d = point_segment_distance(points, polygon[e], polygon[(e + 1) % n])
        if np.all(d <= tol):
            return True
    return False


def load_environment(document: Mapping[str, Any],
                     interfaces: Optional[List[float]] = None) -> Tuple[MotionSpace, PlanningSpaceLayout]:
    """
    Validate an environment document and build the motion space and layout.

    If the document carries no explicit `channels`, the rectangle builder
    decomposes the bounds along the psi levels.
    """
    if not isinstance(document, Mapping):
        raise ValidationError("environment: expected a mapping at the document root")

    bounds = _parse_bounds(document)
    layout = _parse_layout(document)
    p = layout.p
    obstacles, groups = _parse_obstacles(document, p)

    if document.get("channels") is not None:
        channels = _parse_channels(document["channels"], p)
    else:
        if interfaces is None and document.get("interfaces") is not None:
            interfaces = _float_list(document["interfaces"], "interfaces")
        channels = build_channel_boundaries(bounds, obstacles, layout.psi_levels, interfaces)

    space = MotionSpace(bounds, tuple(obstacles), tuple(groups), tuple(channels))
    _validate_space(space)
    return space, layout


def load_environment_file(path: str) -> Tuple[MotionSpace, PlanningSpaceLayout]:
    if not os.path.exists(path):
        raise ValidationError(f"environment file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ValidationError(f"environment file {path}: parse error ({e})")
    print(f"[env] Loaded environment: {os.path.basename(path)}")
    return load_environment(doc)


def serialize_environment(space: MotionSpace, layout: PlanningSpaceLayout) -> Dict[str, Any]:
    """Inverse of load_environment. Channels are written explicitly."""
    b = space.bounds

    def _poly(pl: BoundaryPolyline) -> Dict[str, Any]:
        return {
            "points": pl.points.tolist(),
            "obstacle_flags": [bool(f) for f in pl.obstacle_flags],
        }

    return {
        "bounds": {"xmin": b.xmin, "xmax": b.xmax, "ymin": b.ymin, "ymax": b.ymax},
        "obstacles": [
            {"polygon": ob.polygon.tolist(), "group": int(ob.group_index)} for ob in space.obstacles
        ],
        "psi_levels": list(layout.psi_levels),
        "phi_range": [layout.phi_min, layout.phi_max],
        "grid": {"m_phi": int(layout.m_phi), "m_rows": list(layout.m_rows)},
        "channels": [
            {side: _poly(pl) for side, pl in zip(_SIDES, ch.sides)} for ch in space.channels
        ],
    }


def coverage_error(space: MotionSpace) -> float:
    """|bounds area - (channels + obstacles)| relative to the bounds area."""
    covered = sum(ch.area for ch in space.channels) + sum(abs(ob.area) for ob in space.obstacles)
    return abs(space.bounds.area - covered) / space.bounds.area

from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from src.errors import ValidationError
from .motion_space import Bounds, BoundaryPolyline, NavigableChannel, Obstacle


@dataclass(frozen=True)
class _Rect:
    obstacle_index: int
    group_index: int
    x0: float
    x1: float
    y0: float
    y1: float


def interface_levels(bounds: Bounds, psi_levels: Sequence[float],
                     interfaces: Optional[Sequence[float]] = None) -> List[float]:
    """
    Physical y of every channel boundary line, bottom to top (p+1 values).

    Without explicit interfaces the psi levels are mapped affinely onto
    [ymin, ymax], i.e. the stream function of a uniform flow.
    """
    psi = [float(v) for v in psi_levels]
    p = len(psi) - 1
    if interfaces is None:
        span = psi[-1] - psi[0]
        ys = [bounds.ymin + (v - psi[0]) / span * bounds.height for v in psi]
        # pin the rim exactly
        ys[0], ys[-1] = bounds.ymin, bounds.ymax
    else:
        inner = [float(v) for v in interfaces]
        if len(inner) != p - 1:
            raise ValidationError(f"interfaces: expected {p - 1} values, got {len(inner)}")
        ys = [bounds.ymin] + inner + [bounds.ymax]
    for q in range(p):
        if not ys[q] < ys[q + 1]:
            raise ValidationError(f"interfaces: line {q + 1} is not below line {q + 2}", index=q + 1)
    return ys


def _as_rectangle(idx: int, obstacle: Obstacle) -> _Rect:
    poly = np.asarray(obstacle.polygon, dtype=float)
    xs = np.unique(poly[:, 0])
    ys = np.unique(poly[:, 1])
    n = len(poly)
    axis_aligned = all(
        poly[h, 0] == poly[(h + 1) % n, 0] or poly[h, 1] == poly[(h + 1) % n, 1]
        for h in range(n)
    )
    if n != 4 or len(xs) != 2 or len(ys) != 2 or not axis_aligned:
        raise ValidationError(f"obstacle {idx}: not an axis-aligned rectangle", index=idx)
    return _Rect(idx, int(obstacle.group_index), float(xs[0]), float(xs[1]), float(ys[0]), float(ys[1]))


def _interface_polyline(bounds: Bounds, y: float, rects: Sequence[_Rect], side: str) -> BoundaryPolyline:
    """Left-to-right trace of one interface, detouring around rects.

    side='below' hugs the lower edges (top of the channel underneath),
    side='above' hugs the upper edges (bottom of the channel on top).
    """
    pts: List[Tuple[float, float]] = [(bounds.xmin, y)]
    flags: List[bool] = []
    for r in rects:
        y_det = r.y0 if side == "below" else r.y1
        pts += [(r.x0, y), (r.x0, y_det), (r.x1, y_det), (r.x1, y)]
        flags += [False, True, True, True]
    pts.append((bounds.xmax, y))
    flags.append(False)
    return BoundaryPolyline(np.array(pts, dtype=float), np.array(flags, dtype=bool))


def _straight(a: Tuple[float, float], b: Tuple[float, float]) -> BoundaryPolyline:
    return BoundaryPolyline(np.array([a, b], dtype=float), np.array([False]))


def build_channel_boundaries(bounds: Bounds, obstacles: Sequence[Obstacle],
                             psi_levels: Sequence[float],
                             interfaces: Optional[Sequence[float]] = None) -> List[NavigableChannel]:
    """
    Decompose a rectangle with axis-aligned rectangular obstacles into p channels.

    Group j's obstacles straddle the interface between channels j and j+1.
    Channel j's top polyline detours along their bottom edges and channel
    j+1's bottom polyline along their top edges; detour segments are flagged.
    """
    ys = interface_levels(bounds, psi_levels, interfaces)
    p = len(ys) - 1

    rects = [_as_rectangle(i, ob) for i, ob in enumerate(obstacles)]
    by_group: List[List[_Rect]] = [[] for _ in range(p + 1)]
    for r in rects:
        g = r.group_index
        if not 1 <= g <= p - 1:
            raise ValidationError(f"obstacle {r.obstacle_index}: group index out of range", index=r.obstacle_index)
        if not (bounds.xmin < r.x0 and r.x1 < bounds.xmax):
            raise ValidationError(
                f"obstacle {r.obstacle_index}: must lie strictly inside the bounds in x", index=r.obstacle_index)
        if not (r.y0 < ys[g] < r.y1):
            raise ValidationError(
                f"obstacle {r.obstacle_index}: does not straddle interface {g + 1} (y={ys[g]:.6g})",
                index=r.obstacle_index)
        for q, yq in enumerate(ys):
            if q != g and r.y0 <= yq <= r.y1:
                raise ValidationError(
                    f"obstacle {r.obstacle_index}: crosses channel interface line {q + 1} (y={yq:.6g})",
                    index=r.obstacle_index)
        if abs(0.5 * (r.y0 + r.y1) - ys[g]) > 1e-9:
            # detours of unequal depth shift the arc-length node spacing on one side
            print(f"[env] Warning: obstacle {r.obstacle_index} is not centered on interface {g + 1}; "
                  f"interface nodes beyond it will not coincide.")
        by_group[g].append(r)

    for g in range(1, p):
        members = sorted(by_group[g], key=lambda r: r.x0)
        for a, b in zip(members, members[1:]):
            if not a.x1 < b.x0:
                raise ValidationError(
                    f"group {g}: obstacles {a.obstacle_index} and {b.obstacle_index} overlap in x",
                    index=g)
        by_group[g] = members

    # a channel squeezed between two groups must keep positive height
    for g in range(1, p - 1):
        for lo in by_group[g]:
            for hi in by_group[g + 1]:
                if lo.x0 < hi.x1 and hi.x0 < lo.x1 and not lo.y1 < hi.y0:
                    raise ValidationError(
                        f"obstacles {lo.obstacle_index} and {hi.obstacle_index}: "
                        f"close channel {g + 1} (vertical overlap)", index=hi.obstacle_index)

    channels: List[NavigableChannel] = []
    for j in range(1, p + 1):
        y_lo, y_hi = ys[j - 1], ys[j]
        if j == 1:
            bottom = _straight((bounds.xmin, y_lo), (bounds.xmax, y_lo))
        else:
            bottom = _interface_polyline(bounds, y_lo, by_group[j - 1], side="above")
        if j == p:
            top = _straight((bounds.xmin, y_hi), (bounds.xmax, y_hi))
        else:
            top = _interface_polyline(bounds, y_hi, by_group[j], side="below")
        right = _straight((bounds.xmax, y_lo), (bounds.xmax, y_hi))
        left = _straight((bounds.xmin, y_lo), (bounds.xmin, y_hi))
        channels.append(NavigableChannel(j, bottom, right, top, left))

    n_detours = sum(len(g) for g in by_group)
    print(f"[env] Built {p} channels around {n_detours} obstacle detours.")
    return channels

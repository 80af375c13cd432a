"""
Uniform arc-length distribution of grid nodes along channel boundaries.

Node i (0-based) sits at arc length i * dL with dL = L / (n - 1), so the first
and last nodes land exactly on the polyline endpoints.
"""
from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import Tuple

from src.env import BoundaryPolyline, NavigableChannel
from src.errors import ValidationError

# joint snapping, relative to the polyline length
_JOINT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class BoundaryNodeSet:
    points: np.ndarray              # (n, 2)
    obstacle_flags: np.ndarray      # (n,) bool
    arc_lengths: np.ndarray         # (n,) s_i
    cumulative_lengths: np.ndarray  # Lambda_0..Lambda_gamma
    total_length: float
    increment: float

    @property
    def n(self) -> int:
        return len(self.points)


def locate_on_segment(s: float, lam_start: float, lam_end: float) -> Tuple[float, float]:
    """
    Barycentric pair (alpha, beta) with alpha*lam_start + beta*lam_end = s, alpha + beta = 1.

    Both components are >= 0 exactly when s lies in [lam_start, lam_end].
    """
    span = float(lam_end) - float(lam_start)
    if span == 0.0:
        raise ValidationError(f"degenerate segment: cumulative lengths {lam_start} and {lam_end} coincide")
    alpha = (float(lam_end) - float(s)) / span
    beta = (float(s) - float(lam_start)) / span
    return alpha, beta


def interpolate_node(omega: Tuple[float, float], p_start, p_end) -> np.ndarray:
    alpha, beta = omega
    return alpha * np.asarray(p_start, dtype=float) + beta * np.asarray(p_end, dtype=float)


def distribute_boundary_nodes(polyline: BoundaryPolyline, n: int) -> BoundaryNodeSet:
    if n < 2:
        raise ValidationError(f"node count must be >= 2 (got {n})")
    lam = polyline.cumulative_lengths
    L = float(lam[-1])
    if L <= 0.0:
        raise ValidationError("zero-length polyline")
    dL = L / (n - 1)
    gamma = polyline.segment_count
    flags = polyline.obstacle_flags
    joint_tol = _JOINT_RTOL * L

    s = np.arange(n, dtype=float) * dL
    s[-1] = L
    pts = np.empty((n, 2), dtype=float)
    node_flags = np.zeros(n, dtype=bool)

    for i, si in enumerate(s):
        # segment h covers [lam[h], lam[h+1]]; the first one with a non-negative Omega wins
        h = int(np.clip(np.searchsorted(lam, si, side="right") - 1, 0, gamma - 1))
        alpha, beta = locate_on_segment(si, lam[h], lam[h + 1])
        if beta > 1.0:
            alpha, beta = 0.0, 1.0
        pts[i] = interpolate_node((alpha, beta), polyline.points[h], polyline.points[h + 1])

        if abs(si - lam[h]) <= joint_tol and h > 0:
            node_flags[i] = bool(flags[h - 1] and flags[h])
        elif abs(si - lam[h + 1]) <= joint_tol and h + 1 < gamma:
            node_flags[i] = bool(flags[h] and flags[h + 1])
        else:
            node_flags[i] = bool(flags[h])

    # endpoints exact
    pts[0] = polyline.points[0]
    pts[-1] = polyline.points[-1]
    pts.setflags(write=False)
    node_flags.setflags(write=False)
    return BoundaryNodeSet(pts, node_flags, s, lam, L, dL)


@dataclass(frozen=True)
class ChannelBoundaryNodes:
    bottom: BoundaryNodeSet
    right: BoundaryNodeSet
    top: BoundaryNodeSet
    left: BoundaryNodeSet


def channel_boundary_nodes(channel: NavigableChannel, m_phi: int, m_rows: int) -> ChannelBoundaryNodes:
    """n = m_phi on bottom/top, m_rows on the sides."""
    return ChannelBoundaryNodes(
        distribute_boundary_nodes(channel.bottom, m_phi),
        distribute_boundary_nodes(channel.right, m_rows),
        distribute_boundary_nodes(channel.top, m_phi),
        distribute_boundary_nodes(channel.left, m_rows),
    )

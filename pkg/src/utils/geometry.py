"""
Common geometry utilities for the planning toolkit.
Provides polygon measures, point-in-polygon predicates and grid blending.
"""

import numpy as np


def polygon_signed_area(polygon: np.ndarray) -> float:
    """
    Shoelace formula. Positive for counterclockwise vertex order.

    Args:
        polygon: (N, 2) vertex array, not closed (first vertex is not repeated).
    """
    p = np.asarray(polygon, dtype=float)
    x, y = p[:, 0], p[:, 1]
    x1 = np.roll(x, -1)
    y1 = np.roll(y, -1)
    return 0.5 * float(np.sum(x * y1 - x1 * y))


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _on_segment(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> bool:
    # c collinear with a-b assumed
    return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])) and (min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed segment intersection test (touching counts)."""
    p1, p2, q1, q2 = (np.asarray(v, dtype=float) for v in (p1, p2, q1, q2))
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def is_simple_polygon(polygon: np.ndarray) -> bool:
    """
    True if no two non-adjacent edges of the closed polygon touch.
    O(N^2); obstacle polygons are small.
    """
    p = np.asarray(polygon, dtype=float)
    n = len(p)
    if n < 3:
        return False
    for i in range(n):
        a1, a2 = p[i], p[(i + 1) % n]
        if np.allclose(a1, a2, rtol=0.0, atol=0.0):
            return False
        for j in range(i + 1, n):
            # skip shared-vertex neighbours
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = p[j], p[(j + 1) % n]
            if segments_intersect(a1, a2, b1, b2):
                return False
    return True


def point_segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point (N, 2) to the closed segment a-b."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(pts[:, 0] - proj[:, 0], pts[:, 1] - proj[:, 1])


def points_in_polygon(points: np.ndarray, polygon: np.ndarray,
                      include_boundary: bool = True, boundary_tol: float = 1e-12) -> np.ndarray:
    """
    Vectorized even-odd ray test.

    Uses a horizontal ray from each point towards +x. Points within boundary_tol
    of an edge are reported as inside when include_boundary is True, outside
    otherwise.

    Args:
        points: (N, 2) query points.
        polygon: (M, 2) vertices, not closed.

    Returns:
        Boolean mask of shape (N,).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polygon, dtype=float)
    x = pts[:, 0]
    y = pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)

    n = len(poly)
    for i in range(n):
        v0 = poly[i]
        v1 = poly[(i + 1) % n]
        on_edge |= point_segment_distance(pts, v0, v1) <= boundary_tol
        if v0[1] == v1[1]:
            continue
        # half-open rule on y so shared vertices are counted once
        crosses = (v0[1] > y) != (v1[1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_isect = v0[0] + (v1[0] - v0[0]) * (y - v0[1]) / (v1[1] - v0[1])
        inside ^= crosses & (x < x_isect)

    if include_boundary:
        return inside | on_edge
    return inside & ~on_edge


def tfi_blend(s: np.ndarray, t: np.ndarray,
              P00: np.ndarray, P10: np.ndarray, P01: np.ndarray, P11: np.ndarray,
              B: np.ndarray, T: np.ndarray, L: np.ndarray, R: np.ndarray) -> np.ndarray:
    """
    Transfinite Interpolation (Coons patch) blending.

    Computes the interior point given:
      - corner points P00, P10, P01, P11
      - boundary points B(bottom), T(top), L(left), R(right) at (s,t)

    Broadcasts over arrays: s, t may be (..., 1) and the boundary points (..., 2).

    Args:
        s, t: Parametric coordinates in [0,1]
        P00, P10, P01, P11: Corner points
        B, T, L, R: Boundary points at (s,t)

    Returns:
        Blended interior point
    """
    P = (1 - t) * B + t * T + (1 - s) * L + s * R
    P = P - ((1 - s) * (1 - t) * P00 + s * (1 - t) * P10 + (1 - s) * t * P01 + s * t * P11)
    return P

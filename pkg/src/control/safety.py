"""
Neighboring-quadrangle safety regions.

For counterclockwise vertices (X_j, Y_j), j = 1..4 (index 5 wraps to 1), a
point p is inside iff Lambda p <= Gamma with
    Lambda_j = (Y_{j+1} - Y_j, X_j - X_{j+1})
    Gamma_j  = X_j (Y_{j+1} - Y_j) - Y_j (X_{j+1} - X_j)
which is the sign of the determinant | X_j X_{j+1} x ; Y_j Y_{j+1} y ; 1 1 1 |.
"""
from __future__ import annotations
import numpy as np
from dataclasses import dataclass

from src.atlas import PlanningAtlas
from src.errors import ValidationError
from src.utils.geometry import polygon_signed_area


@dataclass(frozen=True, eq=False)
class QuadrangleConstraint:
    vertices: np.ndarray   # (4, 2) counterclockwise
    Lambda: np.ndarray     # (4, 2)
    Gamma: np.ndarray      # (4,)
    clamped: bool = False  # waypoint on the lattice rim, region shrunk to a box

    def __post_init__(self):
        for name in ("vertices", "Lambda", "Gamma"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def slack(self, position) -> np.ndarray:
        """Gamma - Lambda p per edge; all >= 0 inside."""
        p = np.asarray(position, dtype=float)[:2]
        return self.Gamma - self.Lambda @ p

    def min_slack(self, position) -> float:
        return float(np.min(self.slack(position)))


def quadrangle_from_vertices(vertices, clamped: bool = False) -> QuadrangleConstraint:
    V = np.asarray(vertices, dtype=float)
    if V.shape != (4, 2):
        raise ValidationError(f"quadrangle needs 4 vertices, got shape {V.shape}")
    if polygon_signed_area(V) <= 0.0:
        raise ValidationError("quadrangle vertices are not counterclockwise")
    X, Y = V[:, 0], V[:, 1]
    X1, Y1 = np.roll(X, -1), np.roll(Y, -1)
    Lam = np.column_stack([Y1 - Y, X - X1])
    Gam = X * (Y1 - Y) - Y * (X1 - X)
    return QuadrangleConstraint(V, Lam, Gam, clamped)


def _box_inside(V: np.ndarray) -> np.ndarray:
    """Largest axis-aligned box bounded by the left/right and bottom/top vertex pairs."""
    x_lo = max(V[0, 0], V[3, 0])
    x_hi = min(V[1, 0], V[2, 0])
    y_lo = max(V[0, 1], V[1, 1])
    y_hi = min(V[2, 1], V[3, 1])
    return np.array([[x_lo, y_lo], [x_hi, y_lo], [x_hi, y_hi], [x_lo, y_hi]])


def build_quadrangle(atlas: PlanningAtlas, node) -> QuadrangleConstraint:
    """
    Quadrangle through the four diagonal neighbors of waypoint node (row, col).

    Vertices on the row below use their `above` position and vertices on the
    row above their `below` position, i.e. the side facing the waypoint.
    On the lattice rim missing neighbors are clamped to the waypoint's own
    row/column and the region is shrunk to an inner axis-aligned box.
    """
    r, c = int(node[0]), int(node[1])
    if not atlas.in_range((r, c)):
        raise ValidationError(f"waypoint ({r}, {c}) out of range {atlas.shape}")
    r_lo, r_hi = r - 1, r + 1
    c_lo, c_hi = c - 1, c + 1
    clamped = r_lo < 0 or c_lo < 0 or r_hi >= atlas.m_psi or c_hi >= atlas.m_phi
    r_lo, c_lo = max(r_lo, 0), max(c_lo, 0)
    r_hi, c_hi = min(r_hi, atlas.m_psi - 1), min(c_hi, atlas.m_phi - 1)

    lower = atlas.above if r_lo < r else atlas.below
    upper = atlas.below if r_hi > r else atlas.above
    V = np.array([
        lower[r_lo, c_lo],
        lower[r_lo, c_hi],
        upper[r_hi, c_hi],
        upper[r_hi, c_lo],
    ])
    if clamped:
        V = _box_inside(V)
    return quadrangle_from_vertices(V, clamped=clamped)


def safety_check(constraint: QuadrangleConstraint, position, tol: float = 0.0) -> bool:
    """True iff Lambda p <= Gamma (closed region), up to tol."""
    return bool(np.all(constraint.slack(position) >= -tol))

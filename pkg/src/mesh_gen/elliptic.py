"""
Inverse elliptic grid generation for one channel.

Solves   a x_pp - 2 b x_pq + c x_qq = 0   (and the same for y)
with p = phi, q = psi index coordinates (unit spacing) and
    a = x_q^2 + y_q^2,  b = x_p x_q + y_p y_q,  c = x_p^2 + y_p^2
as a Dirichlet problem: boundary nodes never move.
"""
from __future__ import annotations
import math

import numpy as np
from typing import Optional, Tuple

from src.errors import SolverError, ValidationError
from src.env import LOOP_TOL
from src.utils.geometry import tfi_blend
from .boundary import ChannelBoundaryNodes
from .config import SolverConfig
from .grid import ChannelGrid, MetricCoefficients


def tfi_initialize(boundary: ChannelBoundaryNodes, index: int = 1,
                   phi: Optional[np.ndarray] = None, psi: Optional[np.ndarray] = None) -> ChannelGrid:
    """
    Transfinite interpolation of the four boundary node sequences.

    Blending parameters are the normalized node indices, matching the uniform
    index grid the solver works on.
    """
    B, R, T, L = (boundary.bottom.points, boundary.right.points,
                  boundary.top.points, boundary.left.points)
    m_phi, m_j = len(B), len(L)
    if len(T) != m_phi or len(R) != m_j:
        raise ValidationError(
            f"channel {index}: boundary node counts bottom/top={len(B)}/{len(T)}, "
            f"left/right={len(L)}/{len(R)} are inconsistent", index=index)
    corners = ((B[0], L[0]), (B[-1], R[0]), (T[0], L[-1]), (T[-1], R[-1]))
    for u, v in corners:
        if np.hypot(*(u - v)) > LOOP_TOL:
            raise ValidationError(f"channel {index}: boundary node corners do not meet", index=index)

    s = np.linspace(0.0, 1.0, m_phi)[:, None, None]
    t = np.linspace(0.0, 1.0, m_j)[None, :, None]
    P = tfi_blend(
        s, t, B[0], B[-1], T[0], T[-1],
        B[:, None, :], T[:, None, :], L[None, :, :], R[None, :, :],
    )
    # boundary rows/columns exactly equal the distributed nodes
    P[:, 0] = B
    P[:, -1] = T
    P[0, 1:-1] = L[1:-1]
    P[-1, 1:-1] = R[1:-1]

    on_obstacle = np.zeros((m_phi, m_j), dtype=bool)
    on_obstacle[:, 0] = boundary.bottom.obstacle_flags
    on_obstacle[:, -1] = boundary.top.obstacle_flags
    on_obstacle[0, 1:-1] = boundary.left.obstacle_flags[1:-1]
    on_obstacle[-1, 1:-1] = boundary.right.obstacle_flags[1:-1]

    if phi is None:
        phi = np.arange(m_phi, dtype=float)
    if psi is None:
        psi = np.arange(m_j, dtype=float)
    return ChannelGrid(index, P[..., 0], P[..., 1], phi, psi, on_obstacle)


def _derivatives(X: np.ndarray, Y: np.ndarray):
    xp = 0.5 * (X[2:, 1:-1] - X[:-2, 1:-1])
    yp = 0.5 * (Y[2:, 1:-1] - Y[:-2, 1:-1])
    xq = 0.5 * (X[1:-1, 2:] - X[1:-1, :-2])
    yq = 0.5 * (Y[1:-1, 2:] - Y[1:-1, :-2])
    return xp, yp, xq, yq


def _coefficients(X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    xp, yp, xq, yq = _derivatives(X, Y)
    return xq * xq + yq * yq, xp * xq + yp * yq, xp * xp + yp * yp


def _operator(A: np.ndarray, a, b, c) -> np.ndarray:
    app = A[2:, 1:-1] - 2.0 * A[1:-1, 1:-1] + A[:-2, 1:-1]
    aqq = A[1:-1, 2:] - 2.0 * A[1:-1, 1:-1] + A[1:-1, :-2]
    apq = 0.25 * (A[2:, 2:] - A[2:, :-2] - A[:-2, 2:] + A[:-2, :-2])
    return a * app - 2.0 * b * apq + c * aqq


def _sor_sweep(Xl, Yl, a, b, c, omega: float) -> float:
    """
    One pointwise SOR pass over nested lists, updated in place.

    Rows (fixed psi index k) are visited bottom to top and each row left to
    right, so every node sees the already relaxed values of its lower and left
    neighbours. Returns the largest nodal move.
    """
    m_phi, m_j = len(Xl), len(Xl[0])
    max_upd = 0.0
    for k in range(1, m_j - 1):
        for i in range(1, m_phi - 1):
            ak, bk, ck = a[i - 1][k - 1], b[i - 1][k - 1], c[i - 1][k - 1]
            d = 2.0 * (ak + ck)
            xl, xc, xr = Xl[i - 1], Xl[i], Xl[i + 1]
            yl, yc, yr = Yl[i - 1], Yl[i], Yl[i + 1]
            x_new = (ak * (xr[k] + xl[k]) + ck * (xc[k + 1] + xc[k - 1])
                     - 0.5 * bk * (xr[k + 1] - xr[k - 1] - xl[k + 1] + xl[k - 1])) / d
            y_new = (ak * (yr[k] + yl[k]) + ck * (yc[k + 1] + yc[k - 1])
                     - 0.5 * bk * (yr[k + 1] - yr[k - 1] - yl[k + 1] + yl[k - 1])) / d
            dx = omega * (x_new - xc[k])
            dy = omega * (y_new - yc[k])
            xc[k] += dx
            yc[k] += dy
            upd = math.hypot(dx, dy)
            if upd > max_upd:
                max_upd = upd
    return max_upd


def metric_coefficients(grid: ChannelGrid) -> MetricCoefficients:
    a, b, c = _coefficients(grid.X, grid.Y)
    return MetricCoefficients(a, b, c)


def residual(grid: ChannelGrid) -> float:
    """Max |discretized left-hand side| over interior nodes, both equations."""
    if grid.m_phi < 3 or grid.m_rows < 3:
        return 0.0
    a, b, c = _coefficients(grid.X, grid.Y)
    rx = _operator(grid.X, a, b, c)
    ry = _operator(grid.Y, a, b, c)
    return float(max(np.max(np.abs(rx)), np.max(np.abs(ry))))


def jacobian_field(grid: ChannelGrid) -> np.ndarray:
    """det J = x_phi y_psi - x_psi y_phi at interior nodes (central differences)."""
    if grid.m_phi < 3 or grid.m_rows < 3:
        return np.zeros((max(grid.m_phi - 2, 0), max(grid.m_rows - 2, 0)))
    xp, yp, xq, yq = _derivatives(grid.X, grid.Y)
    return xp * yq - xq * yp


def min_jacobian(grid: ChannelGrid) -> float:
    J = jacobian_field(grid)
    return float(np.min(J)) if J.size else float("nan")


def solve_elliptic(init: ChannelGrid, config: SolverConfig = SolverConfig()
                   ) -> Tuple[ChannelGrid, MetricCoefficients]:
    """
    Pointwise successive over-relaxation with lagged coefficients.

    Each sweep recomputes a, b, c from the current iterate, then relaxes the
    interior nodes one at a time, row by row. The sweep order is fixed, so
    results are reproducible bit for bit.

    Raises:
        SolverError: no convergence within max_iterations, or a folded grid
            (det J <= 0 at an interior node). The diagnostics carry the grid.
    """
    X = np.array(init.X, dtype=float)
    Y = np.array(init.Y, dtype=float)
    m_phi, m_j = X.shape

    if m_phi < 3 or m_j < 3:
        grid = init.with_solution(X, Y, iterations=0, residual=0.0, max_update=0.0,
                                  update_history=(), converged=True)
        return grid, metric_coefficients(grid)

    Xl, Yl = X.tolist(), Y.tolist()
    history = []
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        a, b, c = _coefficients(np.asarray(Xl), np.asarray(Yl))
        if np.any(a + c <= 0.0):
            bad = np.argwhere(a + c <= 0.0)[0] + 1
            raise SolverError(
                f"channel {init.index}: degenerate metric at node (i={bad[0]}, k={bad[1]})",
                index=init.index, diagnostics={"iterations": it})

        max_upd = _sor_sweep(Xl, Yl, a.tolist(), b.tolist(), c.tolist(), config.omega)
        if not (np.isfinite(Xl).all() and np.isfinite(Yl).all()):
            max_upd = float("nan")
        history.append(max_upd)
        if not np.isfinite(max_upd):
            break
        if max_upd < config.tolerance:
            converged = True
            break

    X, Y = np.array(Xl), np.array(Yl)

    grid = init.with_solution(
        X, Y, iterations=it,
        residual=float("nan"), max_update=history[-1] if history else 0.0,
        update_history=tuple(history), converged=converged,
    )
    grid = grid.with_solution(grid.X, grid.Y, residual=residual(grid) if converged else float("nan"))

    if not converged:
        raise SolverError(
            f"channel {init.index}: no convergence in {it} sweeps (max update {history[-1]:.3e} m)",
            index=init.index,
            diagnostics={"iterations": it, "max_update": history[-1], "grid": grid},
        )

    min_det = min_jacobian(grid)
    if not min_det > 0.0:
        raise SolverError(
            f"channel {init.index}: folded grid (min det J = {min_det:.3e})",
            index=init.index,
            diagnostics={"iterations": it, "min_det_j": min_det, "grid": grid},
        )
    return grid, metric_coefficients(grid)

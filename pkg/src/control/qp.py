"""
Dense QP solver for the tracking controller.

    minimize    U' W1 U + 2 w2' U
    subject to  A_ineq U <= b_ineq,  A_eq U = b_eq

Equalities are eliminated first (U = U0 + Z y, Z an orthonormal null-space
basis of A_eq). The reduced problem is solved by a primal active-set method
started from a feasible point found by a phase-1 linear program.
"""
from __future__ import annotations
import numpy as np
from dataclasses import dataclass, field
from typing import Optional, Tuple

from scipy.linalg import svd
from scipy.optimize import linprog

from .mpc import QpProblem

FEAS_TOL = 1e-9
_RANK_RTOL = 1e-10
_ZERO_ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QpSolution:
    U: Optional[np.ndarray]
    objective: float
    active_set: Tuple[int, ...]      # inequality rows held at equality
    status: str                      # "optimal" | "infeasible" | "max_iter"
    iterations: int = 0
    kkt_residual: float = float("nan")
    violated_row: Optional[int] = None
    violated_kind: Optional[str] = None   # "inequality" | "equality"
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _infeasible(row: int, kind: str, iterations: int = 0) -> QpSolution:
    return QpSolution(None, float("nan"), (), "infeasible", iterations,
                      violated_row=int(row), violated_kind=kind)


def eliminate_equalities(A_eq: np.ndarray, b_eq: np.ndarray, n: int):
    """
    Least-norm particular solution U0 and null-space basis Z of A_eq.

    Returns (U0, Z, worst_row, worst_residual); worst_row is None when the
    equalities are consistent.
    """
    if A_eq.size == 0 or A_eq.shape[0] == 0:
        return np.zeros(n), np.eye(n), None, 0.0
    Ue, s, Vt = svd(A_eq, full_matrices=True)
    r = int(np.sum(s > _RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    U0 = Vt[:r].T @ ((Ue[:, :r].T @ b_eq) / s[:r])
    Z = Vt[r:].T
    res = A_eq @ U0 - b_eq
    worst = int(np.argmax(np.abs(res)))
    if abs(res[worst]) > FEAS_TOL * (1.0 + float(np.max(np.abs(b_eq)))):
        return U0, Z, worst, float(abs(res[worst]))
    return U0, Z, None, 0.0


def _phase_one(A: np.ndarray, b: np.ndarray, starts) -> Tuple[Optional[np.ndarray], int]:
    """A point with A y <= b, or (None, most violated row)."""
    for y in starts:
        if y is not None and (A.shape[0] == 0 or np.max(A @ y - b) <= FEAS_TOL):
            return y, -1
    d = A.shape[1]
    # minimize t  s.t.  A y - t <= b
    c = np.zeros(d + 1)
    c[-1] = 1.0
    res = linprog(
        c, A_ub=np.hstack([A, -np.ones((A.shape[0], 1))]), b_ub=b,
        bounds=[(None, None)] * d + [(-1.0, None)], method="highs",
    )
    if res.x is None:
        return None, int(np.argmax(-b))
    y = res.x[:d]
    viol = A @ y - b
    if res.status != 0 or np.max(viol) > FEAS_TOL:
        return None, int(np.argmax(viol))
    return y, -1


def _kkt_solve(Q: np.ndarray, g: np.ndarray, Aw: np.ndarray):
    """Step p and multipliers lam of  min 1/2 p'Qp + g'p  s.t.  Aw p = 0."""
    d = Q.shape[0]
    m = Aw.shape[0]
    if m == 0:
        return np.linalg.solve(Q, -g), np.zeros(0)
    K = np.block([[Q, Aw.T], [Aw, np.zeros((m, m))]])
    rhs = np.concatenate([-g, np.zeros(m)])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:d], sol[d:]


def solve_qp(problem: QpProblem, warm_start: Optional[np.ndarray] = None,
             max_iter: int = 500) -> QpSolution:
    W1 = np.asarray(problem.W1, dtype=float)
    w2 = np.asarray(problem.w2, dtype=float)
    n = W1.shape[0]
    A_in = np.asarray(problem.A_ineq, dtype=float).reshape(-1, n)
    b_in = np.asarray(problem.b_ineq, dtype=float).reshape(-1)
    A_eq = np.asarray(problem.A_eq, dtype=float).reshape(-1, n)
    b_eq = np.asarray(problem.b_eq, dtype=float).reshape(-1)

    U0, Z, bad_eq, _ = eliminate_equalities(A_eq, b_eq, n)
    if bad_eq is not None:
        return _infeasible(bad_eq, "equality")

    Q = 2.0 * Z.T @ W1 @ Z
    Q = 0.5 * (Q + Q.T)
    c = 2.0 * Z.T @ (W1 @ U0 + w2)
    A = A_in @ Z
    b = b_in - A_in @ U0

    # rows the reduced variables cannot influence are constant checks
    row_norm = np.linalg.norm(A, axis=1) if A.size else np.zeros(A.shape[0])
    scale = max(1.0, float(np.max(np.linalg.norm(A_in, axis=1)))) if A_in.size else 1.0
    const = row_norm <= _ZERO_ROW_TOL * scale
    for i in np.flatnonzero(const):
        if b[i] < -FEAS_TOL:
            return _infeasible(int(i), "inequality")
    live = np.flatnonzero(~const)
    A_live, b_live = A[live], b[live]
    d = Z.shape[1]

    if d == 0:
        # equalities fix U; every inequality row is constant here
        return _finish(problem, W1, w2, A_in, b_in, A_eq, U0, (), np.zeros(0), "optimal", 0)

    y_ws = None
    if warm_start is not None:
        y_ws = Z.T @ (np.asarray(warm_start, dtype=float) - U0)
    y, worst = _phase_one(A_live, b_live, (y_ws, np.zeros(d)))
    if y is None:
        return _infeasible(int(live[worst]), "inequality")

    working: list = []
    lam = np.zeros(0)
    status = "max_iter"
    it = 0
    for it in range(1, max_iter + 1):
        g = Q @ y + c
        Aw = A_live[working] if working else np.zeros((0, d))
        p, lam = _kkt_solve(Q, g, Aw)

        if np.max(np.abs(p)) <= 1e-12 * (1.0 + np.max(np.abs(y))):
            if lam.size == 0 or np.min(lam) >= -1e-12:
                status = "optimal"
                break
            working.pop(int(np.argmin(lam)))
            continue

        Ap = A_live @ p
        alpha, block = 1.0, -1
        for i in range(A_live.shape[0]):
            if i in working or Ap[i] <= 1e-14:
                continue
            a_i = max((b_live[i] - A_live[i] @ y) / Ap[i], 0.0)
            if a_i < alpha:
                alpha, block = a_i, i
        y = y + alpha * p
        if block >= 0:
            working.append(block)

    U = U0 + Z @ y
    active = tuple(sorted(int(live[i]) for i in working))
    if status != "optimal":
        # lam belongs to the working set before the last add or drop
        lam = _kkt_solve(Q, Q @ y + c, A_live[working])[1] if working else np.zeros(0)
    mult = np.zeros(A_in.shape[0])
    if working:
        mult[[int(live[i]) for i in working]] = lam
    return _finish(problem, W1, w2, A_in, b_in, A_eq, U, active, mult, status, it)


def _finish(problem, W1, w2, A_in, b_in, A_eq, U, active, mult, status, iterations) -> QpSolution:
    grad = 2.0 * (W1 @ U + w2)
    if mult.size == 0:
        mult = np.zeros(A_in.shape[0])
    r = grad + A_in.T @ mult
    if A_eq.shape[0]:
        nu = np.linalg.lstsq(A_eq.T, -r, rcond=None)[0]
        r = r + A_eq.T @ nu
        eq_res = float(np.max(np.abs(A_eq @ U - problem.b_eq)))
    else:
        eq_res = 0.0
    slack = b_in - A_in @ U if A_in.size else np.zeros(0)
    terms = [float(np.max(np.abs(r))), eq_res]
    if slack.size:
        terms += [float(max(0.0, -np.min(slack))), float(max(0.0, -np.min(mult))),
                  float(np.max(np.abs(mult * slack)))]
    return QpSolution(
        U=U, objective=problem.objective(U), active_set=tuple(active), status=status,
        iterations=int(iterations), kkt_residual=max(terms), multipliers=mult,
    )

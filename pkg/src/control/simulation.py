from __future__ import annotations
import numpy as np
import pandas as pd
from dataclasses import dataclass
from typing import List, Optional, Sequence

from tqdm import tqdm

from src.atlas import PlanningAtlas, min_node_spacing
from src.errors import SolverError, ValidationError
from .config import MpcConfig
from .dynamics import STATE_DIM, ExternalDynamics, InternalDynamics, step_external, step_internal
from .mpc import assemble_qp, build_prediction
from .qp import solve_qp
from .safety import QuadrangleConstraint, build_quadrangle

LOG_COLUMNS = ["k", "x", "y", "z", "vx", "vy", "vz", "ux", "uy", "uz", "psi", "slack_min"]


@dataclass(frozen=True, eq=False)
class TrackingResult:
    log: pd.DataFrame                   # LOG_COLUMNS, one row per control step
    desired: np.ndarray                 # (K, 2) reference position at each logged step
    quadrangles: List[QuadrangleConstraint]   # one per waypoint
    waypoint_of_step: np.ndarray        # (K,) quadrangle index used at each logged step
    reached: bool
    yaw: np.ndarray                     # (K, 2)

    @property
    def steps(self) -> int:
        return len(self.log)

    def min_slack(self) -> float:
        return float(self.log["slack_min"].min())

    def max_altitude_error(self, z0: float) -> float:
        return float(np.max(np.abs(self.log["z"].to_numpy() - z0)))


class Reference:
    """Path traversed at `hold_steps` control steps per waypoint."""

    def __init__(self, waypoints: np.ndarray, hold_steps: int):
        self.waypoints = np.asarray(waypoints, dtype=float).reshape(-1, 2)
        self.hold = int(hold_steps)
        self.last = len(self.waypoints) - 1

    @property
    def schedule_end(self) -> int:
        return self.last * self.hold

    def progress(self, t: int) -> float:
        return min(t / self.hold, float(self.last))

    def position(self, t: int) -> np.ndarray:
        s = self.progress(t)
        i = min(int(np.floor(s)), self.last)
        if i >= self.last:
            return self.waypoints[self.last]
        frac = s - i
        return (1.0 - frac) * self.waypoints[i] + frac * self.waypoints[i + 1]

    def waypoint_index(self, t: int) -> int:
        # round half up keeps the index monotone in t
        return min(int(np.floor(self.progress(t) + 0.5)), self.last)


def run_tracking_sim(atlas: PlanningAtlas, path_nodes: Sequence, waypoints: np.ndarray,
                     config: MpcConfig, x0: Optional[np.ndarray] = None,
                     yaw0: Optional[Sequence[float]] = None, progress: bool = True) -> TrackingResult:
    """
    Closed-loop MPC tracking of a planned path.

    At step k the QP covers steps k+1..k+n_tau with the reference positions
    and the quadrangles of the waypoints scheduled for those steps. The first
    control block is applied. The run ends once the schedule is complete and
    the position is within half the atlas node spacing of the final waypoint,
    or when max_steps is exhausted.

    Raises:
        ValidationError: empty path, or initial position outside the first quadrangle.
        SolverError: the QP is infeasible at some step.
    """
    waypoints = np.asarray(waypoints, dtype=float).reshape(-1, 2)
    if len(waypoints) == 0 or len(path_nodes) != len(waypoints):
        raise ValidationError("tracking: path must be non-empty with one node per waypoint")

    dyn = ExternalDynamics.build(config.dt)
    yaw_dyn = InternalDynamics.build(config.dt, config.yaw_gains)
    pred = build_prediction(dyn, config.n_tau)
    ref = Reference(waypoints, config.hold_steps)
    quads = [build_quadrangle(atlas, node) for node in path_nodes]
    tol_reach = 0.5 * min_node_spacing(atlas)

    if x0 is None:
        x = np.zeros(STATE_DIM)
        x[0:2] = waypoints[0]
        x[2] = config.z0
    else:
        x = np.asarray(x0, dtype=float).reshape(STATE_DIM).copy()
    if quads[0].min_slack(x[:2]) < -1e-9:
        raise ValidationError(f"tracking: initial position {tuple(x[:2])} is outside the first quadrangle")
    z = np.asarray(yaw0 if yaw0 is not None else config.yaw0, dtype=float)

    rows, desired, used, yaws = [], [], [], []
    U_prev: Optional[np.ndarray] = None
    reached = False
    n = config.n_tau

    with tqdm(total=config.max_steps, desc="Tracking", leave=False, disable=not progress) as pbar:
        for k in range(config.max_steps):
            wp_k = ref.waypoint_index(k)
            slack_k = quads[wp_k].min_slack(x[:2])
            if k >= ref.schedule_end and np.hypot(*(x[:2] - waypoints[-1])) <= tol_reach:
                reached = True
                rows.append([k, *x[0:3], *x[3:6], 0.0, 0.0, 0.0, z[0], slack_k])
                desired.append(ref.position(k))
                used.append(wp_k)
                yaws.append(z.copy())
                break

            steps = range(k + 1, k + n + 1)
            window = np.array([ref.position(t) for t in steps])
            q_window = [quads[ref.waypoint_index(t)] for t in steps]
            problem = assemble_qp(dyn, config, x, window, q_window, prediction=pred)

            warm = None
            if U_prev is not None:
                warm = np.concatenate([U_prev[3:], U_prev[-3:]])
            sol = solve_qp(problem, warm_start=warm, max_iter=config.qp_max_iter)
            if not sol.ok:
                raise SolverError(
                    f"tracking: QP {sol.status} at step {k}"
                    + (f" ({sol.violated_kind} row {sol.violated_row})" if sol.violated_row is not None else ""),
                    index=k,
                    diagnostics={"step": k, "status": sol.status, "violated_row": sol.violated_row,
                                 "violated_kind": sol.violated_kind, "state": x.copy()},
                )
            u = sol.U[:3]
            rows.append([k, *x[0:3], *x[3:6], *u, z[0], slack_k])
            desired.append(ref.position(k))
            used.append(wp_k)
            yaws.append(z.copy())

            x = step_external(dyn, x, u)
            z = step_internal(yaw_dyn, z)
            U_prev = sol.U
            pbar.update(1)

    log = pd.DataFrame(rows, columns=LOG_COLUMNS)
    log["k"] = log["k"].astype(int)
    status = "reached" if reached else "step budget exhausted"
    tqdm.write(f"[mpc] Tracking {status} after {len(log)} steps; min slack {log['slack_min'].min():.3e}.")
    return TrackingResult(log, np.array(desired), quads, np.array(used, dtype=int), reached, np.array(yaws))

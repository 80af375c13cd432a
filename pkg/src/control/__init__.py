from .dynamics import (
    INPUT_DIM, STATE_DIM, ExternalDynamics, InternalDynamics, place_yaw_gains, shift_matrix,
    spectral_radius, step_external, step_internal,
)
from .config import MpcConfig
from .safety import QuadrangleConstraint, build_quadrangle, quadrangle_from_vertices, safety_check
from .mpc import Prediction, QpProblem, assemble_qp, build_prediction
from .qp import QpSolution, eliminate_equalities, solve_qp
from .simulation import LOG_COLUMNS, Reference, TrackingResult, run_tracking_sim

__all__ = [
    "INPUT_DIM", "STATE_DIM", "ExternalDynamics", "InternalDynamics", "place_yaw_gains",
    "shift_matrix", "spectral_radius", "step_external", "step_internal",
    "MpcConfig", "QuadrangleConstraint", "build_quadrangle", "quadrangle_from_vertices",
    "safety_check", "Prediction", "QpProblem", "assemble_qp", "build_prediction",
    "QpSolution", "eliminate_equalities", "solve_qp",
    "LOG_COLUMNS", "Reference", "TrackingResult", "run_tracking_sim",
]

"""
Condensed MPC: prediction matrices and per-step QP assembly.

Over the horizon Y = G x_k + H U with Y block i = x_{k+i} (i = 1..n) and
U block j = u_{k+j-1}; the cost
    J = sum_h beta ||C x_{k+h} - p_{k+h}||_F^2 + ||U||^2
equals U' W1 U + 2 w2' U + const.
"""
from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.linalg import block_diag

from src.errors import ValidationError
from .config import MpcConfig
from .dynamics import INPUT_DIM, STATE_DIM, ExternalDynamics
from .safety import QuadrangleConstraint

_Z_INDEX = 2   # altitude component of x


@dataclass(frozen=True, eq=False)
class Prediction:
    G: np.ndarray    # (12n, 12)
    H: np.ndarray    # (12n, 3n)
    C_p: np.ndarray  # (2n, 12n)

    @property
    def n_tau(self) -> int:
        return self.G.shape[0] // STATE_DIM


@dataclass(frozen=True, eq=False)
class QpProblem:
    W1: np.ndarray
    w2: np.ndarray
    A_ineq: np.ndarray
    b_ineq: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    G: Optional[np.ndarray] = None
    H: Optional[np.ndarray] = None
    C_p: Optional[np.ndarray] = None

    @property
    def n_vars(self) -> int:
        return self.W1.shape[0]

    def objective(self, U) -> float:
        U = np.asarray(U, dtype=float)
        return float(U @ self.W1 @ U + 2.0 * self.w2 @ U)


def build_prediction(dyn: ExternalDynamics, n_tau: int) -> Prediction:
    if n_tau < 1:
        raise ValidationError(f"n_tau must be >= 1 (got {n_tau})")
    A, B = dyn.A_p, dyn.B_p
    powers = [np.eye(STATE_DIM)]
    for _ in range(n_tau):
        powers.append(powers[-1] @ A)

    G = np.vstack(powers[1:])
    H = np.zeros((STATE_DIM * n_tau, INPUT_DIM * n_tau))
    for i in range(n_tau):
        for j in range(i + 1):
            H[STATE_DIM * i:STATE_DIM * (i + 1), INPUT_DIM * j:INPUT_DIM * (j + 1)] = powers[i - j] @ B

    sel = np.zeros((2, STATE_DIM))
    sel[0, 0] = sel[1, 1] = 1.0
    C_p = np.kron(np.eye(n_tau), sel)
    return Prediction(G, H, C_p)


def assemble_qp(dyn: ExternalDynamics, config: MpcConfig, x_k, window,
                quadrangles: Sequence[QuadrangleConstraint],
                prediction: Optional[Prediction] = None) -> QpProblem:
    """
    Build W1, w2, the quadrangle inequalities and the altitude equalities.

    window: (n_tau, 2) desired positions for steps k+1..k+n_tau.
    quadrangles: constraint for each of those steps.
    """
    n = config.n_tau
    pred = prediction if prediction is not None else build_prediction(dyn, n)
    if pred.n_tau != n:
        raise ValidationError(f"prediction horizon {pred.n_tau} does not match n_tau={n}")
    x = np.asarray(x_k, dtype=float).reshape(-1)
    if x.shape != (STATE_DIM,):
        raise ValidationError(f"state must have {STATE_DIM} entries, got {x.size}")
    P = np.asarray(window, dtype=float).reshape(-1, 2)
    if P.shape[0] != n:
        raise ValidationError(f"window has {P.shape[0]} positions, expected {n}")
    if len(quadrangles) != n:
        raise ValidationError(f"{len(quadrangles)} quadrangles for a horizon of {n}")

    G, H, C = pred.G, pred.H, pred.C_p
    f = config.weight_diagonal()
    if f.size != 2 * n:
        raise ValidationError(f"weight diagonal has {f.size} entries, expected {2 * n}")

    CH = C @ H
    CGx = C @ (G @ x)
    e = CGx - P.reshape(-1)
    W1 = np.eye(INPUT_DIM * n) + config.beta * CH.T @ (f[:, None] * CH)
    W1 = 0.5 * (W1 + W1.T)
    w2 = config.beta * (e * f) @ CH

    Lam = block_diag(*[q.Lambda for q in quadrangles])
    Gam = np.concatenate([q.Gamma for q in quadrangles])
    A_ineq = Lam @ CH
    b_ineq = Gam - Lam @ CGx

    E = np.zeros((n, STATE_DIM * n))
    E[np.arange(n), STATE_DIM * np.arange(n) + _Z_INDEX] = 1.0
    A_eq = E @ H
    b_eq = config.z0 * np.ones(n) - E @ (G @ x)

    return QpProblem(W1, w2, A_ineq, b_ineq, A_eq, b_eq, G, H, C)

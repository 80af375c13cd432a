"""
Linear quadcopter models used by the tracking controller.

External: x = (r, v, a, j) in R^12, snap input u in R^3,
    x_{k+1} = A_p x_k + B_p u_k,  A_p = I + dT N,  B_p = dT [0; 0; 0; I].
Internal (yaw): z = (psi, psi_dot) under state feedback v_k = k_psi z_k,
    z_{k+1} = A_psi z_k,  A_psi = [[1, dT], [0, 1]] + [0; 1] k_psi.
"""
from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import Sequence, Tuple

from src.errors import ValidationError

STATE_DIM = 12
INPUT_DIM = 3


def _ro(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def shift_matrix() -> np.ndarray:
    """Block shift N: r <- v, v <- a, a <- j. Nilpotent, N^4 = 0."""
    N = np.zeros((STATE_DIM, STATE_DIM))
    for blk in range(3):
        N[3 * blk:3 * blk + 3, 3 * (blk + 1):3 * (blk + 1) + 3] = np.eye(3)
    return N


@dataclass(frozen=True, eq=False)
class ExternalDynamics:
    dt: float
    A_p: np.ndarray
    B_p: np.ndarray

    @staticmethod
    def build(dt: float) -> "ExternalDynamics":
        if not dt > 0:
            raise ValidationError(f"dt must be > 0 (got {dt})")
        A = np.eye(STATE_DIM) + dt * shift_matrix()
        B = np.zeros((STATE_DIM, INPUT_DIM))
        B[9:12, :] = dt * np.eye(3)
        return ExternalDynamics(float(dt), _ro(A), _ro(B))


def step_external(dyn: ExternalDynamics, x, u) -> np.ndarray:
    return dyn.A_p @ np.asarray(x, dtype=float) + dyn.B_p @ np.asarray(u, dtype=float)


def place_yaw_gains(dt: float, poles: Sequence[float] = (0.9, 0.9)) -> Tuple[float, float]:
    """
    k_psi = (g1, g2) placing the eigenvalues of A_psi at the given (real) poles.

    Characteristic polynomial: l^2 - (2 + g2) l + (1 + g2 - dt g1).
    """
    l1, l2 = (float(p) for p in poles)
    g2 = l1 + l2 - 2.0
    g1 = (1.0 + g2 - l1 * l2) / dt
    return g1, g2


@dataclass(frozen=True, eq=False)
class InternalDynamics:
    dt: float
    k_psi: Tuple[float, float]
    A_psi: np.ndarray

    @staticmethod
    def build(dt: float, k_psi: Sequence[float]) -> "InternalDynamics":
        if len(k_psi) != 2:
            raise ValidationError(f"k_psi must have 2 entries (got {len(k_psi)})")
        g = (float(k_psi[0]), float(k_psi[1]))
        A = np.array([[1.0, dt], [0.0, 1.0]]) + np.array([[0.0, 0.0], [g[0], g[1]]])
        rho = spectral_radius(A)
        if not rho < 1.0:
            raise ValidationError(
                f"yaw loop unstable: spectral radius {rho:.6g} >= 1 for k_psi={g}")
        return InternalDynamics(float(dt), g, _ro(A))

    @property
    def spectral_radius(self) -> float:
        return spectral_radius(self.A_psi)

    def decay_bound(self, k: int) -> float:
        """
        Upper bound on ||z_k|| / ||z_0||.

        A double eigenvalue l is a Jordan block: A = l I + M with M^2 = 0,
        so A^k = l^k I + k l^(k-1) M.
        """
        A = self.A_psi
        tr = float(np.trace(A))
        disc = tr * tr - 4.0 * float(np.linalg.det(A))
        if abs(disc) <= 1e-12:
            lam = 0.5 * tr
            M = A - lam * np.eye(2)
            return abs(lam) ** k + k * abs(lam) ** max(k - 1, 0) * float(np.linalg.norm(M, 2))
        _, V = np.linalg.eig(A)
        return float(np.linalg.cond(V)) * self.spectral_radius ** k


def step_internal(dyn: InternalDynamics, z) -> np.ndarray:
    return dyn.A_psi @ np.asarray(z, dtype=float)


def spectral_radius(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A))))

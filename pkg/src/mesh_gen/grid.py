from __future__ import annotations
import numpy as np
from dataclasses import dataclass, replace
from typing import Tuple


def _ro(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChannelGrid:
    """
    Node positions of one channel over its uniform (phi, psi) index grid.

    X, Y and on_obstacle have shape (m_phi, m_j), indexed [i, k] with i along
    phi (left to right) and k along psi (bottom to top).
    """
    index: int
    X: np.ndarray
    Y: np.ndarray
    phi: np.ndarray           # (m_phi,)
    psi: np.ndarray           # (m_j,)
    on_obstacle: np.ndarray   # boundary nodes inheriting a flagged segment
    iterations: int = 0
    residual: float = float("nan")
    max_update: float = float("nan")
    update_history: Tuple[float, ...] = ()
    converged: bool = False

    def __post_init__(self):
        for name, dtype in (("X", float), ("Y", float), ("phi", float), ("psi", float), ("on_obstacle", bool)):
            object.__setattr__(self, name, _ro(getattr(self, name), dtype))
        object.__setattr__(self, "update_history", tuple(float(v) for v in self.update_history))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.X.shape

    @property
    def m_phi(self) -> int:
        return self.X.shape[0]

    @property
    def m_rows(self) -> int:
        return self.X.shape[1]

    @property
    def bottom_flags(self) -> np.ndarray:
        return self.on_obstacle[:, 0]

    @property
    def top_flags(self) -> np.ndarray:
        return self.on_obstacle[:, -1]

    def positions(self) -> np.ndarray:
        """(m_phi, m_j, 2) stacked node positions."""
        return np.stack([self.X, self.Y], axis=-1)

    def with_solution(self, X, Y, **diagnostics) -> "ChannelGrid":
        return replace(self, X=X, Y=Y, **diagnostics)


@dataclass(frozen=True, eq=False)
class MetricCoefficients:
    """a, b, c of the inverse elliptic system at interior nodes, shape (m_phi-2, m_j-2)."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

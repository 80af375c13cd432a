from __future__ import annotations
import numpy as np
import yaml
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Tuple

from .dynamics import place_yaw_gains


def _float_tuple(v) -> Tuple[float, ...]:
    if isinstance(v, (int, float)):
        return (float(v),)
    return tuple(float(x) for x in v)


@dataclass(frozen=True)
class MpcConfig:
    dt: float = 0.05
    n_tau: int = 10
    beta: float = 50.0
    f_diag: Tuple[float, ...] = (1.0, 1.0)     # one (fx, fy) pair for every step, or 2*n_tau entries
    z0: float = 10.0                           # altitude hold (m)
    k_psi: Optional[Tuple[float, float]] = None  # None = both yaw eigenvalues at 0.9
    max_steps: int = 4000
    hold_steps: int = 20                       # control steps spent per path waypoint
    yaw0: Tuple[float, float] = (0.1, 0.0)
    qp_max_iter: int = 500

    @property
    def yaw_gains(self) -> Tuple[float, float]:
        if self.k_psi is not None:
            return self.k_psi
        return place_yaw_gains(self.dt, (0.9, 0.9))

    def weight_diagonal(self) -> np.ndarray:
        """Diagonal of F = diag(f_0, ..., f_{n_tau-1}), length 2*n_tau."""
        f = np.asarray(self.f_diag, dtype=float)
        if f.size == 2:
            return np.tile(f, self.n_tau)
        return f.copy()

    @staticmethod
    def from_yaml(path: Optional[str]) -> "MpcConfig":
        if path is None:
            return MpcConfig()
        with open(path, "r", encoding="utf-8") as f:
            full_config = yaml.safe_load(f)
        return MpcConfig.from_mapping(full_config)

    @staticmethod
    def from_mapping(full_config: Optional[Mapping[str, Any]]) -> "MpcConfig":
        # Settings live under 'control'; a flat JSON config is read from the root
        full_config = full_config or {}
        raw = full_config.get("control", full_config) or {}

        def _get(name: str, cast, default):
            v = raw.get(name, default)
            try:
                return cast(v)
            except Exception as e:
                raise ValueError(f"Invalid config value: {name}={v!r} ({e})")

        k_psi = _get("k_psi", lambda v: None if v is None else _float_tuple(v), None)
        cfg = MpcConfig(
            dt=_get("dt", float, MpcConfig.dt),
            n_tau=_get("n_tau", int, MpcConfig.n_tau),
            beta=_get("beta", float, MpcConfig.beta),
            f_diag=_get("f_diag", _float_tuple, MpcConfig.f_diag),
            z0=_get("z0", float, MpcConfig.z0),
            k_psi=k_psi,
            max_steps=_get("max_steps", int, MpcConfig.max_steps),
            hold_steps=_get("hold_steps", int, MpcConfig.hold_steps),
            yaw0=_get("yaw0", _float_tuple, MpcConfig.yaw0),
            qp_max_iter=_get("qp_max_iter", int, MpcConfig.qp_max_iter),
        )
        cfg.validate()
        return cfg

    def validate(self) -> "MpcConfig":
        if self.dt <= 0:
            raise ValueError("dt must be > 0.")
        if self.n_tau < 1:
            raise ValueError("n_tau must be >= 1.")
        if self.beta < 0:
            raise ValueError("beta must be >= 0.")
        if len(self.f_diag) not in (2, 2 * self.n_tau):
            raise ValueError(f"f_diag must have 2 or {2 * self.n_tau} entries.")
        if any(f < 0 for f in self.f_diag):
            raise ValueError("f_diag entries must be >= 0.")
        if self.k_psi is not None and len(self.k_psi) != 2:
            raise ValueError("k_psi must have 2 entries.")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1.")
        if self.hold_steps < 1:
            raise ValueError("hold_steps must be >= 1.")
        if len(self.yaw0) != 2:
            raise ValueError("yaw0 must have 2 entries.")
        if self.qp_max_iter < 1:
            raise ValueError("qp_max_iter must be >= 1.")
        return self

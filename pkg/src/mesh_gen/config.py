from __future__ import annotations
import yaml
from dataclasses import dataclass
from typing import Any, Mapping, Optional


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 50000
    tolerance: float = 1e-8      # meters, max nodal update
    omega: float = 1.5           # SOR relaxation factor
    workers: int = 1             # >1: channels solved in a thread pool

    @staticmethod
    def from_yaml(path: Optional[str]) -> "SolverConfig":
        if path is None:
            return SolverConfig()
        with open(path, "r", encoding="utf-8") as f:
            full_config = yaml.safe_load(f)
        return SolverConfig.from_mapping(full_config)

    @staticmethod
    def from_mapping(full_config: Optional[Mapping[str, Any]]) -> "SolverConfig":
        # Settings live under 'solver'; a flat document is read from the root
        full_config = full_config or {}
        raw = full_config.get("solver", full_config) or {}

        def _get(name: str, cast, default):
            v = raw.get(name, default)
            try:
                return cast(v)
            except Exception as e:
                raise ValueError(f"Invalid config value: {name}={v!r} ({e})")

        cfg = SolverConfig(
            max_iterations=_get("max_iterations", int, SolverConfig.max_iterations),
            tolerance=_get("tolerance", float, SolverConfig.tolerance),
            omega=_get("omega", float, SolverConfig.omega),
            workers=_get("workers", int, SolverConfig.workers),
        )

        if cfg.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1.")
        if cfg.tolerance <= 0:
            raise ValueError("tolerance must be > 0.")
        if not (0.0 < cfg.omega < 2.0):
            raise ValueError("omega must be in (0,2).")
        if cfg.workers < 1:
            raise ValueError("workers must be >= 1.")

        return cfg

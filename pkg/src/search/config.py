from __future__ import annotations
import yaml
from dataclasses import dataclass
from typing import Any, Mapping, Optional

from src.atlas import DEFAULT_EPSILON


def _optional_float(v):
    return None if v is None else float(v)


@dataclass(frozen=True)
class PlanningConfig:
    epsilon: float = DEFAULT_EPSILON     # interface coincidence tolerance (m)
    cell_size: Optional[float] = None    # baseline raster; None = atlas min node spacing

    @staticmethod
    def from_yaml(path: Optional[str]) -> "PlanningConfig":
        if path is None:
            return PlanningConfig()
        with open(path, "r", encoding="utf-8") as f:
            full_config = yaml.safe_load(f)
        return PlanningConfig.from_mapping(full_config)

    @staticmethod
    def from_mapping(full_config: Optional[Mapping[str, Any]]) -> "PlanningConfig":
        full_config = full_config or {}
        raw = full_config.get("planning", full_config) or {}

        def _get(name: str, cast, default):
            v = raw.get(name, default)
            try:
                return cast(v)
            except Exception as e:
                raise ValueError(f"Invalid config value: {name}={v!r} ({e})")

        cfg = PlanningConfig(
            epsilon=_get("epsilon", float, PlanningConfig.epsilon),
            cell_size=_get("cell_size", _optional_float, PlanningConfig.cell_size),
        )

        if cfg.epsilon < 0:
            raise ValueError("epsilon must be >= 0.")
        if cfg.cell_size is not None and cfg.cell_size <= 0:
            raise ValueError("cell_size must be > 0.")

        return cfg

import os, sys
from typing import Dict, Optional, Tuple

import numpy as np

from src.atlas import PlanningAtlas, neighbors, stitch_channels
from src.control import MpcConfig, run_tracking_sim
from src.env import load_environment_file
from src.errors import SafetyViolation, ValidationError
from src.mesh_gen import SolverConfig, solve_channels
from src.result_analysis import (
    grid_diagnostics, plot_controls, plot_grid, plot_paths, plot_tracking, read_path_csv,
    write_atlas_csv, write_grid_csv, write_json, write_path_csv, write_trajectory_csv,
)
from src.search import PathQuery, PlanningConfig, astar_planning_space, compare_planners
from src.version import VERSION

# Determine base directory for absolute paths
if getattr(sys, 'frozen', False):
    BASE_DIR = os.path.dirname(sys.executable)
else:
    BASE_DIR = os.path.dirname(os.path.abspath(__file__))

CONFIG_FILE = os.path.join(BASE_DIR, "config", "config.yaml")
BENCHMARK_ENV = os.path.join(BASE_DIR, "config", "benchmark_env.json")

SLACK_TOL = 1e-8
ALTITUDE_TOL = 1e-6


def load_configs(config_path: Optional[str] = None) -> Tuple[SolverConfig, PlanningConfig, MpcConfig]:
    """Solver, planning and control settings; defaults come from config/config.yaml when present."""
    path = config_path if config_path is not None else (CONFIG_FILE if os.path.exists(CONFIG_FILE) else None)
    if path is not None and not os.path.exists(path):
        raise ValidationError(f"config file not found: {path}")
    try:
        return SolverConfig.from_yaml(path), PlanningConfig.from_yaml(path), MpcConfig.from_yaml(path)
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"config {path}: {e}")


def build_atlas(env_path: str, solver_cfg: SolverConfig, planning_cfg: PlanningConfig, progress: bool = True):
    space, layout = load_environment_file(env_path)
    grids = solve_channels(space, layout, solver_cfg, progress=progress)
    atlas = stitch_channels(grids, planning_cfg.epsilon)
    return space, layout, grids, atlas


def write_manifest(out_dir: str, subcommand: str, env_path: str, params: Dict, seed: Optional[int]) -> str:
    manifest = {
        "version": VERSION,
        "subcommand": subcommand,
        "environment": os.path.abspath(env_path),
        "out_dir": os.path.abspath(out_dir),
        "parameters": params,
        "seed": seed,
    }
    return write_json(manifest, os.path.join(out_dir, "run_manifest.json"))


def _grid_artifacts(out_dir: str, space, grids, atlas: PlanningAtlas) -> Dict[str, str]:
    diag = grid_diagnostics(grids)
    out = {
        "grid_csv": write_grid_csv(grids, os.path.join(out_dir, "grid.csv")),
        "diagnostics": write_json(diag, os.path.join(out_dir, "grid_diagnostics.json")),
        "atlas_csv": write_atlas_csv(atlas, os.path.join(out_dir, "atlas.csv")),
        "grid_svg": plot_grid(space, grids, os.path.join(out_dir, "grid.svg")),
    }
    min_det = min(d["min_det_j"] for d in diag.values() if d["min_det_j"] is not None) \
        if any(d["min_det_j"] is not None for d in diag.values()) else None
    print(f"[cli] grid: {len(grids)} channels, min det J = {min_det}")
    return out


def run_grid(env_path: str, out_dir: str, config_path: Optional[str] = None,
             seed: Optional[int] = None, progress: bool = True) -> Dict[str, str]:
    solver_cfg, planning_cfg, _ = load_configs(config_path)
    space, _, grids, atlas = build_atlas(env_path, solver_cfg, planning_cfg, progress)
    out = _grid_artifacts(out_dir, space, grids, atlas)
    out["manifest"] = write_manifest(out_dir, "grid", env_path, {"config": config_path}, seed)
    return out


def _query(start, goal) -> PathQuery:
    return PathQuery(tuple(start), tuple(goal))


def _plan_artifacts(out_dir: str, space, atlas: PlanningAtlas, query: PathQuery, baseline: bool,
                    cs: Optional[float]) -> Dict[str, str]:
    out = {}
    if baseline:
        cmp = compare_planners(space, atlas, query, cs)
        sandwich, base = cmp.sandwich, cmp.baseline
        report = cmp.report()
        out["baseline_csv"] = write_path_csv(base, os.path.join(out_dir, "path_baseline.csv"))
    else:
        sandwich, base = astar_planning_space(atlas, query), None
        report = {"sandwich_length": float(sandwich.length), "baseline_length": None, "reduction_percent": None}

    out["path_csv"] = write_path_csv(sandwich, os.path.join(out_dir, "path.csv"))
    out["comparison"] = write_json(report, os.path.join(out_dir, "comparison.json"))
    out["paths_svg"] = plot_paths(space, sandwich, os.path.join(out_dir, "paths.svg"), baseline=base, atlas=atlas)
    return out


def run_plan(env_path: str, out_dir: str, start, goal, baseline: bool = False,
             config_path: Optional[str] = None, cell_size: Optional[float] = None,
             seed: Optional[int] = None, progress: bool = True) -> Dict[str, str]:
    solver_cfg, planning_cfg, _ = load_configs(config_path)
    space, _, _, atlas = build_atlas(env_path, solver_cfg, planning_cfg, progress)
    query = _query(start, goal).validate(space)
    cs = cell_size if cell_size is not None else planning_cfg.cell_size
    out = _plan_artifacts(out_dir, space, atlas, query, baseline, cs)
    params = {"start": list(query.start), "goal": list(query.goal), "baseline": bool(baseline),
              "cell_size": cs, "config": config_path}
    out["manifest"] = write_manifest(out_dir, "plan", env_path, params, seed)
    return out


def run_compare(env_path: str, out_dir: str, start, goal, config_path: Optional[str] = None,
                cell_size: Optional[float] = None, seed: Optional[int] = None,
                progress: bool = True) -> Dict[str, str]:
    """Grid artifacts plus both planners on one query, from a single atlas build."""
    solver_cfg, planning_cfg, _ = load_configs(config_path)
    space, _, grids, atlas = build_atlas(env_path, solver_cfg, planning_cfg, progress)
    query = _query(start, goal).validate(space)
    cs = cell_size if cell_size is not None else planning_cfg.cell_size
    out = _grid_artifacts(out_dir, space, grids, atlas)
    out.update(_plan_artifacts(out_dir, space, atlas, query, True, cs))
    out["manifest"] = write_manifest(
        out_dir, "compare", env_path,
        {"start": [float(v) for v in start], "goal": [float(v) for v in goal],
         "cell_size": cell_size, "config": config_path}, seed)
    return out


def _check_path_on_atlas(atlas: PlanningAtlas, nodes, points, tol: float = 1e-6) -> None:
    for k, ((r, c), p) in enumerate(zip(nodes, points)):
        if not atlas.in_range((r, c)):
            raise ValidationError(f"path waypoint {k}: node ({r}, {c}) outside the atlas", index=k)
        if atlas.forbidden[r, c]:
            raise ValidationError(f"path waypoint {k}: node ({r}, {c}) is forbidden", index=k)
        d = min(np.hypot(*(atlas.below[r, c] - p)), np.hypot(*(atlas.above[r, c] - p)))
        if d > tol:
            raise ValidationError(
                f"path waypoint {k}: position does not match atlas node ({r}, {c}) (off by {d:.3e} m)", index=k)
    for k in range(1, len(nodes)):
        u, v = tuple(nodes[k - 1]), tuple(nodes[k])
        if u != v and v not in {tuple(nb) for nb, _ in neighbors(atlas, u)}:
            raise ValidationError(f"path waypoints {k - 1} and {k} are not atlas neighbors", index=k)


def run_track(env_path: str, out_dir: str, path_csv: str, config_path: Optional[str] = None,
              seed: Optional[int] = None, progress: bool = True) -> Dict[str, str]:
    solver_cfg, planning_cfg, mpc_cfg = load_configs(config_path)
    nodes, points = read_path_csv(path_csv)
    space, _, _, atlas = build_atlas(env_path, solver_cfg, planning_cfg, progress)
    _check_path_on_atlas(atlas, nodes, points)

    result = run_tracking_sim(atlas, nodes, points, mpc_cfg, progress=progress)
    min_slack = result.min_slack()
    alt_err = result.max_altitude_error(mpc_cfg.z0)
    summary = {
        "steps": int(result.steps),
        "reached": bool(result.reached),
        "min_slack": float(min_slack),
        "max_altitude_error": float(alt_err),
    }
    out = {
        "trajectory_csv": write_trajectory_csv(result.log, os.path.join(out_dir, "trajectory.csv")),
        "summary": write_json(summary, os.path.join(out_dir, "tracking_summary.json")),
        "tracking_svg": plot_tracking(space, result, points, os.path.join(out_dir, "tracking.svg")),
        "controls_svg": plot_controls(result.log, os.path.join(out_dir, "controls.svg")),
    }
    out["manifest"] = write_manifest(out_dir, "track", env_path,
                                     {"path": os.path.abspath(path_csv), "config": config_path}, seed)

    if min_slack < -SLACK_TOL:
        k = int(result.log["k"].iloc[int(result.log["slack_min"].to_numpy().argmin())])
        raise SafetyViolation(f"tracking: quadrangle slack {min_slack:.3e} at step {k}", index=k)
    if alt_err > ALTITUDE_TOL:
        raise SafetyViolation(f"tracking: altitude error {alt_err:.3e} m exceeds {ALTITUDE_TOL:g} m")
    return out

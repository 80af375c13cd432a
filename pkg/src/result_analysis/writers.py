"""
CSV and JSON artifacts. Floats are written with 17 significant digits so that
every double round-trips exactly.
"""
import json
import os
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import ValidationError
from src.mesh_gen import min_jacobian

FLOAT_FORMAT = "%.17g"
PATH_COLUMNS = ["k", "row", "col", "x", "y"]


def _save_csv(df: pd.DataFrame, path) -> str:
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    print(f"Saved CSV: {path}")
    return str(path)


def write_json(obj, path) -> str:
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    print(f"Saved JSON: {path}")
    return str(path)


def grid_frame(grids) -> pd.DataFrame:
    parts = []
    for g in grids:
        I, K = np.meshgrid(np.arange(g.m_phi), np.arange(g.m_rows), indexing="ij")
        parts.append(pd.DataFrame({
            "channel": g.index,
            "i": I.ravel(),
            "k": K.ravel(),
            "phi": np.broadcast_to(g.phi[:, None], I.shape).ravel(),
            "psi": np.broadcast_to(g.psi[None, :], I.shape).ravel(),
            "x": g.X.ravel(),
            "y": g.Y.ravel(),
            "on_obstacle": g.on_obstacle.ravel().astype(int),
        }))
    return pd.concat(parts, ignore_index=True)


def write_grid_csv(grids, path) -> str:
    return _save_csv(grid_frame(grids), path)


def _num(v):
    v = float(v)
    return v if np.isfinite(v) else None


def grid_diagnostics(grids) -> dict:
    return {
        str(g.index): {
            "iterations": int(g.iterations),
            "residual": _num(g.residual),
            "max_update": _num(g.max_update),
            "min_det_j": _num(min_jacobian(g)),
            "converged": bool(g.converged),
        }
        for g in grids
    }


def write_atlas_csv(atlas, path) -> str:
    R, C = np.meshgrid(np.arange(atlas.m_psi), np.arange(atlas.m_phi), indexing="ij")
    df = pd.DataFrame({
        "row": R.ravel(),
        "col": C.ravel(),
        "x_below": atlas.below[..., 0].ravel(),
        "y_below": atlas.below[..., 1].ravel(),
        "x_above": atlas.above[..., 0].ravel(),
        "y_above": atlas.above[..., 1].ravel(),
        "forbidden": atlas.forbidden.ravel().astype(int),
    })
    return _save_csv(df, path)


def write_path_csv(path_obj, path) -> str:
    nodes = np.array(path_obj.nodes, dtype=int).reshape(-1, 2)
    df = pd.DataFrame({
        "k": np.arange(len(nodes)),
        "row": nodes[:, 0],
        "col": nodes[:, 1],
        "x": path_obj.points[:, 0],
        "y": path_obj.points[:, 1],
    })
    return _save_csv(df, path)


def read_path_csv(path):
    """
    Load a path dump written by write_path_csv.

    Returns (nodes, points). Malformed rows raise ValidationError naming the
    file line (header = line 1).
    """
    if not os.path.exists(path):
        raise ValidationError(f"path file not found: {path}")
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ValidationError(f"{path}: parse error ({e})")
    missing = [c for c in PATH_COLUMNS if c not in df.columns]
    if missing:
        raise ValidationError(f"{path}: line 1: missing columns {missing}")
    if len(df) == 0:
        raise ValidationError(f"{path}: no waypoints")

    num = df[PATH_COLUMNS].apply(pd.to_numeric, errors="coerce")
    bad = num.isna().any(axis=1).to_numpy() | ~np.isfinite(num.to_numpy(dtype=float)).all(axis=1)
    for col in ("k", "row", "col"):
        vals = num[col].to_numpy(dtype=float)
        with np.errstate(invalid="ignore"):
            bad |= np.isfinite(vals) & (vals != np.round(vals))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValidationError(f"{path}: line {i + 2}: malformed path row {df.iloc[i].tolist()}", index=i + 2)

    nodes = [(int(r), int(c)) for r, c in zip(num["row"], num["col"])]
    points = num[["x", "y"]].to_numpy(dtype=float)
    return nodes, points


def write_trajectory_csv(log: pd.DataFrame, path) -> str:
    return _save_csv(log, path)

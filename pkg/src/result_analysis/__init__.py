from .writers import (
    FLOAT_FORMAT, PATH_COLUMNS, grid_diagnostics, grid_frame, read_path_csv, write_atlas_csv,
    write_grid_csv, write_json, write_path_csv, write_trajectory_csv,
)
from .plots import plot_controls, plot_grid, plot_paths, plot_tracking

__all__ = [
    "FLOAT_FORMAT", "PATH_COLUMNS", "grid_diagnostics", "grid_frame", "read_path_csv",
    "write_atlas_csv", "write_grid_csv", "write_json", "write_path_csv", "write_trajectory_csv",
    "plot_controls", "plot_grid", "plot_paths", "plot_tracking",
]

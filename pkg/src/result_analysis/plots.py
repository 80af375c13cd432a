"""
SVG figures for grid, path and tracking results.

Figures are written without a timestamp and with a fixed hash salt so repeated
runs produce identical files.
"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Polygon

# Dark theme shared by every figure
THEME = {
    "figure.facecolor": "#0B0F14",
    "axes.facecolor": "#0B0F14",
    "axes.edgecolor": "#243244",
    "axes.labelcolor": "#EAF2FF",
    "xtick.color": "#6F8098",
    "ytick.color": "#6F8098",
    "grid.color": "#243244",
    "text.color": "#EAF2FF",
    "figure.autolayout": True,
    "svg.hashsalt": "channel-planner",
    "svg.fonttype": "none",
}
OBSTACLE_COLOR = "#4A5568"
POTENTIAL_COLOR = "#FF5A5F"
STREAM_COLOR = "#EAF2FF"
SANDWICH_COLOR = "#2EE7FF"
BASELINE_COLOR = "#FFB020"
FORBIDDEN_COLOR = "#FFE600"
ACTUAL_COLOR = "#3DDC84"


def _save(fig, path) -> str:
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    print(f"Saved Graph: {path}")
    return str(path)


def _legend(ax):
    ax.legend(facecolor="#141E2A", edgecolor="#243244", labelcolor="#EAF2FF")


def _draw_space(ax, space):
    b = space.bounds
    ax.add_patch(Polygon(b.polygon(), closed=True, fill=False, edgecolor="#6F8098", linewidth=1.0))
    for ob in space.obstacles:
        ax.add_patch(Polygon(ob.polygon, closed=True, facecolor=OBSTACLE_COLOR,
                             edgecolor="#EAF2FF", linewidth=0.8))
    ax.set_xlim(b.xmin - 0.02 * b.width, b.xmax + 0.02 * b.width)
    ax.set_ylim(b.ymin - 0.05 * b.height, b.ymax + 0.05 * b.height)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)", fontsize=10)
    ax.set_ylabel("y (m)", fontsize=10)


def plot_grid(space, grids, path, title="Potential and stream lines") -> str:
    """phi-constant (red) and psi-constant (light) lines over the obstacle outlines."""
    with plt.rc_context(THEME):
        fig, ax = plt.subplots(figsize=(12, 5))
        _draw_space(ax, space)
        for g in grids:
            for i in range(g.m_phi):
                ax.plot(g.X[i, :], g.Y[i, :], color=POTENTIAL_COLOR, linewidth=0.4)
            for k in range(g.m_rows):
                ax.plot(g.X[:, k], g.Y[:, k], color=STREAM_COLOR, linewidth=0.4)
        ax.set_title(title, color="#EAF2FF", fontsize=12, fontweight="bold")
        return _save(fig, path)


def plot_paths(space, sandwich, path, baseline=None, atlas=None, title="Sandwich and regular A* paths") -> str:
    with plt.rc_context(THEME):
        fig, ax = plt.subplots(figsize=(12, 5))
        _draw_space(ax, space)
        if atlas is not None and atlas.forbidden.any():
            fr, fc = np.nonzero(atlas.forbidden)
            pts = atlas.below[fr, fc]
            ax.scatter(pts[:, 0], pts[:, 1], s=6, color=FORBIDDEN_COLOR, label="forbidden nodes", zorder=3)
        ax.plot(sandwich.points[:, 0], sandwich.points[:, 1], color=SANDWICH_COLOR, linewidth=2,
                label=f"sandwich A* ({sandwich.length:.2f} m)", zorder=4)
        if baseline is not None:
            ax.plot(baseline.points[:, 0], baseline.points[:, 1], color=BASELINE_COLOR, linewidth=2,
                    linestyle="--", label=f"regular A* ({baseline.length:.2f} m)", zorder=4)
        ax.grid(True, linestyle="--", alpha=0.5)
        ax.set_title(title, color="#EAF2FF", fontsize=12, fontweight="bold")
        _legend(ax)
        return _save(fig, path)


def plot_tracking(space, result, waypoints, path, title="Actual vs desired path") -> str:
    """Actual positions, the desired waypoints and the quadrangle tube."""
    with plt.rc_context(THEME):
        fig, ax = plt.subplots(figsize=(12, 5))
        _draw_space(ax, space)
        for q in result.quadrangles:
            ax.add_patch(Polygon(q.vertices, closed=True, fill=False, edgecolor="#6F8098",
                                 linewidth=0.5, alpha=0.8))
        wp = np.asarray(waypoints)
        ax.plot(wp[:, 0], wp[:, 1], color=POTENTIAL_COLOR, marker="o", markersize=2,
                linewidth=1, label="desired")
        ax.plot(result.log["x"], result.log["y"], color=ACTUAL_COLOR, linewidth=1.5, label="actual")
        ax.grid(True, linestyle="--", alpha=0.5)
        ax.set_title(title, color="#EAF2FF", fontsize=12, fontweight="bold")
        _legend(ax)
        return _save(fig, path)


def plot_controls(log, path, title="Control input (snap)") -> str:
    with plt.rc_context(THEME):
        fig, ax = plt.subplots(figsize=(10, 6))
        for col, color in (("ux", "#2EE7FF"), ("uy", "#FFB020"), ("uz", "#3DDC84")):
            ax.plot(log["k"], log[col], color=color, linewidth=1.2, label=col)
        ax.set_xlabel("step k", fontsize=10)
        ax.set_ylabel("u (m/s^4)", fontsize=10)
        ax.grid(True, linestyle="--", alpha=0.5)
        ax.set_title(title, color="#EAF2FF", fontsize=12, fontweight="bold")
        _legend(ax)
        return _save(fig, path)

from __future__ import annotations
import argparse
import os
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from tqdm import tqdm

from src.env import MotionSpace, PlanningSpaceLayout, load_environment_file
from src.errors import SolverError
from .boundary import channel_boundary_nodes
from .config import SolverConfig
from .elliptic import min_jacobian, solve_elliptic, tfi_initialize
from .grid import ChannelGrid


def build_initial_grid(space: MotionSpace, layout: PlanningSpaceLayout, j: int) -> ChannelGrid:
    """Arc-length boundary nodes of channel j (1-based) blended into its TFI start grid."""
    channel = space.channels[j - 1]
    nodes = channel_boundary_nodes(channel, layout.m_phi, layout.m_rows[j - 1])
    return tfi_initialize(nodes, index=j, phi=layout.phi_values(), psi=layout.psi_values(j))


def _solve_one(space: MotionSpace, layout: PlanningSpaceLayout, j: int, cfg: SolverConfig) -> ChannelGrid:
    grid, _ = solve_elliptic(build_initial_grid(space, layout, j), cfg)
    return grid


def solve_channels(space: MotionSpace, layout: PlanningSpaceLayout,
                   cfg: Optional[SolverConfig] = None, progress: bool = True) -> List[ChannelGrid]:
    """
    Solve every channel and return grids in channel order.

    Channels are independent; with cfg.workers > 1 they run in a thread pool.
    Each solve is sequential, so the result does not depend on scheduling.
    """
    cfg = cfg or SolverConfig()
    if space.p != layout.p:
        raise SolverError(f"{space.p} channels but layout describes {layout.p}")

    indices = list(range(1, space.p + 1))
    grids: List[Optional[ChannelGrid]] = [None] * space.p

    with tqdm(total=len(indices), desc="Channel solves", leave=False, disable=not progress) as pbar:
        if cfg.workers > 1 and len(indices) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = {j: pool.submit(_solve_one, space, layout, j, cfg) for j in indices}
                for j in indices:
                    grids[j - 1] = futures[j].result()
                    _report(grids[j - 1])
                    pbar.update(1)
        else:
            for j in indices:
                grids[j - 1] = _solve_one(space, layout, j, cfg)
                _report(grids[j - 1])
                pbar.update(1)

    return [g for g in grids if g is not None]


def _report(grid: ChannelGrid) -> None:
    tqdm.write(
        f"[meshgen] channel {grid.index}: converged in {grid.iterations} sweeps "
        f"(max update {grid.max_update:.1e}, residual {grid.residual:.1e}, min det J {min_jacobian(grid):.3g})"
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Solve the channel grids of an environment.")
    parser.add_argument("env_file")
    parser.add_argument("-c", "--config", default=None)
    args = parser.parse_args()

    space, layout = load_environment_file(args.env_file)
    cfg = SolverConfig.from_yaml(args.config) if args.config and os.path.exists(args.config) else SolverConfig()
    for g in solve_channels(space, layout, cfg):
        print(f"channel {g.index}: {g.m_phi} x {g.m_rows} nodes")

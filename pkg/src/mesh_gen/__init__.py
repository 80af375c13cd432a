from .config import SolverConfig
from .grid import ChannelGrid, MetricCoefficients
from .boundary import (
    BoundaryNodeSet, ChannelBoundaryNodes, channel_boundary_nodes,
    distribute_boundary_nodes, interpolate_node, locate_on_segment,
)
from .elliptic import (
    jacobian_field, metric_coefficients, min_jacobian, residual, solve_elliptic, tfi_initialize,
)
from .main import build_initial_grid, solve_channels

__all__ = [
    "SolverConfig", "ChannelGrid", "MetricCoefficients",
    "BoundaryNodeSet", "ChannelBoundaryNodes", "channel_boundary_nodes",
    "distribute_boundary_nodes", "interpolate_node", "locate_on_segment",
    "jacobian_field", "metric_coefficients", "min_jacobian", "residual",
    "solve_elliptic", "tfi_initialize",
    "build_initial_grid", "solve_channels",
]

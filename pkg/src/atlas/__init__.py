from .atlas import (
    DEFAULT_EPSILON, NodeId, PlanningAtlas, atlas_from_positions, edge_cost, edge_positions,
    min_node_spacing, neighbors, physical_position, stitch_channels,
)

__all__ = [
    "DEFAULT_EPSILON", "NodeId", "PlanningAtlas", "atlas_from_positions", "edge_cost",
    "edge_positions", "min_node_spacing", "neighbors", "physical_position", "stitch_channels",
]

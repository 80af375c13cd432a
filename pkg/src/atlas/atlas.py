"""
Planning atlas: channel grids stacked into one (row, col) lattice.

Interface rows (shared by channels j and j+1) are stored once, with two
physical positions: `below` from channel j's top boundary and `above` from
channel j+1's bottom boundary. Where an obstacle sits between the channels
the two differ, and such nodes are forbidden.
"""
from __future__ import annotations
import numpy as np
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

from src.errors import ValidationError
from src.mesh_gen import ChannelGrid

DEFAULT_EPSILON = 1e-6

_MOVES = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


class NodeId(NamedTuple):
    row: int
    col: int


def _ro(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PlanningAtlas:
    below: np.ndarray            # (m_psi, m_phi, 2)
    above: np.ndarray            # (m_psi, m_phi, 2)
    forbidden: np.ndarray        # (m_psi, m_phi) bool
    flagged: np.ndarray          # (m_psi, m_phi) bool, obstacle flag from either side
    is_interface: np.ndarray     # (m_psi,) bool
    channel_of_row: np.ndarray   # (m_psi,) channel index; interface rows belong to the channel above
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        for name, dtype in (("below", float), ("above", float), ("forbidden", bool),
                            ("flagged", bool), ("is_interface", bool), ("channel_of_row", int)):
            object.__setattr__(self, name, _ro(getattr(self, name), dtype))

    @property
    def m_psi(self) -> int:
        return self.below.shape[0]

    @property
    def m_phi(self) -> int:
        return self.below.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.m_psi, self.m_phi

    @property
    def interface_rows(self) -> np.ndarray:
        return np.flatnonzero(self.is_interface)

    def in_range(self, node) -> bool:
        r, c = node
        return 0 <= r < self.m_psi and 0 <= c < self.m_phi

    def forbidden_nodes(self) -> List[NodeId]:
        return [NodeId(int(r), int(c)) for r, c in np.argwhere(self.forbidden)]


def stitch_channels(grids: Sequence[ChannelGrid], epsilon: float = DEFAULT_EPSILON) -> PlanningAtlas:
    """
    Stack channel grids bottom to top.

    A node is forbidden iff it carries an obstacle flag or, on an interface
    row, its two positions are farther apart than epsilon.
    """
    if not grids:
        raise ValidationError("atlas: no channel grids")
    if epsilon < 0:
        raise ValidationError("atlas: epsilon must be >= 0")
    for pos, g in enumerate(grids, start=1):
        if g.index != pos:
            raise ValidationError(f"atlas: missing channel {pos} (got channel {g.index})", index=pos)
    m_phi = grids[0].m_phi
    for g in grids:
        if g.m_phi != m_phi:
            raise ValidationError(
                f"atlas: channel {g.index} has m_phi={g.m_phi}, expected {m_phi}", index=g.index)

    m_psi = sum(g.m_rows for g in grids) - (len(grids) - 1)
    below = np.empty((m_psi, m_phi, 2))
    above = np.empty((m_psi, m_phi, 2))
    flagged = np.zeros((m_psi, m_phi), dtype=bool)
    is_interface = np.zeros(m_psi, dtype=bool)
    channel_of_row = np.zeros(m_psi, dtype=int)

    offset = 0
    for g in grids:
        P = g.positions().transpose(1, 0, 2)       # (m_j, m_phi, 2), row-major
        F = g.on_obstacle.T
        rows = slice(offset, offset + g.m_rows)
        if offset > 0:
            # interface row: keep the lower channel's top as `below`
            lower_top = below[offset].copy()
            lower_flags = flagged[offset].copy()
            below[rows] = P
            above[rows] = P
            below[offset] = lower_top
            flagged[rows] = F
            flagged[offset] |= lower_flags
            is_interface[offset] = True
        else:
            below[rows] = P
            above[rows] = P
            flagged[rows] = F
        channel_of_row[rows] = g.index
        offset += g.m_rows - 1

    gap = np.hypot(*(below - above).transpose(2, 0, 1))
    forbidden = flagged | (gap > epsilon)
    atlas = PlanningAtlas(below, above, forbidden, flagged, is_interface, channel_of_row, float(epsilon))
    print(f"[atlas] Stitched {len(grids)} channels: {m_psi} x {m_phi} nodes, "
          f"{int(forbidden.sum())} forbidden.")
    return atlas


def _check(atlas: PlanningAtlas, node) -> NodeId:
    r, c = int(node[0]), int(node[1])
    if not atlas.in_range((r, c)):
        raise ValidationError(f"node ({r}, {c}) out of range {atlas.shape}")
    return NodeId(r, c)


def physical_position(atlas: PlanningAtlas, node, side: str = "below") -> np.ndarray:
    r, c = _check(atlas, node)
    if side == "below":
        return atlas.below[r, c]
    if side == "above":
        return atlas.above[r, c]
    raise ValidationError(f"side must be 'below' or 'above', got {side!r}")


def edge_positions(atlas: PlanningAtlas, a, b) -> Tuple[np.ndarray, np.ndarray]:
    """
    Positions of a and b as seen from the channel holding both rows.

    The lower-row node uses its `above` position and the upper-row node its
    `below` position; nodes on the same row use `below`.
    """
    (ra, ca), (rb, cb) = a, b
    if ra < rb:
        return atlas.above[ra, ca], atlas.below[rb, cb]
    if ra > rb:
        return atlas.below[ra, ca], atlas.above[rb, cb]
    return atlas.below[ra, ca], atlas.below[rb, cb]


def edge_cost(atlas: PlanningAtlas, a, b) -> float:
    pa, pb = edge_positions(atlas, a, b)
    return float(np.hypot(pb[0] - pa[0], pb[1] - pa[1]))


def _move_allowed(atlas: PlanningAtlas, r: int, c: int, dr: int, dc: int) -> bool:
    r2, c2 = r + dr, c + dc
    if not (0 <= r2 < atlas.m_psi and 0 <= c2 < atlas.m_phi):
        return False
    if atlas.forbidden[r2, c2]:
        return False
    if dr != 0 and dc != 0 and (atlas.is_interface[r] or atlas.is_interface[r2]):
        # no corner cutting past a forbidden interface node
        if atlas.forbidden[r2, c] or atlas.forbidden[r, c2]:
            return False
    return True


def neighbors(atlas: PlanningAtlas, node) -> List[Tuple[NodeId, float]]:
    """8-connected neighbors with chordal costs in meters, in fixed move order."""
    r, c = _check(atlas, node)
    if atlas.forbidden[r, c]:
        raise ValidationError(f"node ({r}, {c}) is forbidden")
    out: List[Tuple[NodeId, float]] = []
    for dr, dc in _MOVES:
        if _move_allowed(atlas, r, c, dr, dc):
            nb = NodeId(r + dr, c + dc)
            out.append((nb, edge_cost(atlas, (r, c), nb)))
    return out


def min_node_spacing(atlas: PlanningAtlas) -> float:
    """Smallest positive length of a horizontal or vertical lattice edge."""
    lengths = [
        np.hypot(*np.diff(atlas.below, axis=1).transpose(2, 0, 1)).ravel(),
        np.hypot(*np.diff(atlas.above, axis=1).transpose(2, 0, 1)).ravel(),
        np.hypot(*(atlas.below[1:] - atlas.above[:-1]).transpose(2, 0, 1)).ravel(),
    ]
    allv = np.concatenate(lengths)
    pos = allv[allv > 0.0]
    if pos.size == 0:
        raise ValidationError("atlas: all lattice edges have zero length")
    return float(pos.min())


def atlas_from_positions(positions: np.ndarray, forbidden=None, interface_rows: Sequence[int] = (),
                         epsilon: float = DEFAULT_EPSILON) -> PlanningAtlas:
    """Atlas over explicit (m_psi, m_phi, 2) positions with coincident interface sides."""
    P = np.asarray(positions, dtype=float)
    m_psi, m_phi = P.shape[:2]
    F = np.zeros((m_psi, m_phi), dtype=bool) if forbidden is None else np.asarray(forbidden, dtype=bool)
    is_interface = np.zeros(m_psi, dtype=bool)
    is_interface[list(interface_rows)] = True
    channel_of_row = np.cumsum(is_interface) + 1
    return PlanningAtlas(P, P, F, F, is_interface, channel_of_row, float(epsilon))

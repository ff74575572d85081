"""Screen-fitting positions for the ordered node-link diagram.

Levels map to horizontal bands (y = level * (node_height + level_gap)); x is
the node's horizontal center. Three passes:

1. naive: root at viewport center, children spread symmetrically around their
   parent at pitch = node_width + min_gap, in sibling order;
2. adjustment, level by level from the top: children of the leftmost parent
   are packed against the left margin, children of the rightmost parent
   against the right margin, and every block in between shifts toward the
   mean of its naive positions, clamped so already-placed neighbors (and
   space reserved for blocks still to place) are respected;
3. a left-to-right sweep per level re-enforces the pitch while preserving
   order, then clamps the level into the viewport.

A level whose node count * pitch exceeds the viewport width raises
LevelOverflow before any position is computed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import LevelOverflow
from .model import DiagramTree

MIN_FIT_NODE_WIDTH = 60.0


@dataclass(frozen=True)
class LayoutConfig:
    viewport_width: float = 1200.0
    node_width: float = 180.0
    node_height: float = 80.0
    min_gap: float = 20.0
    level_gap: float = 60.0

    def validate(self) -> None:
        sizes = (
            self.viewport_width,
            self.node_width,
            self.node_height,
            self.min_gap,
            self.level_gap,
        )
        if any(v <= 0 for v in sizes):
            raise ValueError("layout dimensions must be positive")
        if self.node_width + self.min_gap > self.viewport_width:
            raise ValueError("a single node does not fit the viewport")

    @property
    def pitch(self) -> float:
        return self.node_width + self.min_gap


@dataclass(frozen=True)
class PositionedNode:
    node_id: str
    x: float
    y: float
    level: int


def layout(tree: DiagramTree, cfg: LayoutConfig) -> dict[str, PositionedNode]:
    """Compute deterministic, overlap-free positions for every node."""
    cfg.validate()
    pitch = cfg.pitch
    width = cfg.viewport_width
    margin_left = cfg.node_width / 2
    margin_right = width - cfg.node_width / 2

    children: dict[str, list[str]] = {nid: [] for nid in tree.nodes}
    by_level: dict[int, list[str]] = {}
    for node in tree.nodes.values():
        by_level.setdefault(node.level, []).append(node.node_id)
        if node.parent_id is not None:
            children[node.parent_id].append(node.node_id)
    for kids in children.values():
        kids.sort(key=lambda nid: tree.nodes[nid].sibling_index)

    max_level = max(by_level)
    for level in sorted(by_level):
        required = len(by_level[level]) * pitch
        if required > width:
            raise LevelOverflow(level, required, width)

    # pass 1: naive top-down spread
    naive: dict[str, float] = {tree.root_id: width / 2}
    order = [tree.root_id]
    cursor = 0
    while cursor < len(order):
        pid = order[cursor]
        cursor += 1
        kids = children[pid]
        k = len(kids)
        for i, nid in enumerate(kids):
            naive[nid] = naive[pid] + (i - (k - 1) / 2) * pitch
        order.extend(kids)

    final: dict[str, float] = {tree.root_id: width / 2}

    for level in range(1, max_level + 1):
        parents = sorted(
            {tree.nodes[nid].parent_id for nid in by_level[level]},
            key=lambda pid: (final[pid], pid),
        )
        blocks = [children[pid] for pid in parents]  # type: ignore[index]
        placed_order: list[str] = []

        if len(blocks) == 1:
            # single parent: keep the naive spread, nudged inside the margins
            kids = blocks[0]
            xs = [naive[nid] for nid in kids]
            shift = 0.0
            if min(xs) < margin_left:
                shift = margin_left - min(xs)
            elif max(xs) > margin_right:
                shift = margin_right - max(xs)
            for nid, x in zip(kids, xs):
                final[nid] = x + shift
            placed_order = list(kids)
        else:
            # pass 2: edge blocks hug the margins, middle blocks aim for
            # the mean of their naive positions
            left_kids, right_kids = blocks[0], blocks[-1]
            for i, nid in enumerate(left_kids):
                final[nid] = margin_left + i * pitch
            right_first = margin_right - (len(right_kids) - 1) * pitch
            for i, nid in enumerate(right_kids):
                final[nid] = right_first + i * pitch
            placed_order.extend(left_kids)

            prev_last = final[left_kids[-1]]
            middles = blocks[1:-1]
            for j, kids in enumerate(middles):
                span = (len(kids) - 1) * pitch
                reserved = sum(len(b) * pitch for b in middles[j + 1 :])
                low_first = prev_last + pitch
                high_first = right_first - pitch - reserved - span
                mean_naive = sum(naive[nid] for nid in kids) / len(kids)
                first = min(max(mean_naive - span / 2, low_first), high_first)
                if low_first > high_first:
                    raise LevelOverflow(level, len(by_level[level]) * pitch, width)
                for i, nid in enumerate(kids):
                    final[nid] = first + i * pitch
                prev_last = first + span
                placed_order.extend(kids)
            placed_order.extend(right_kids)

        # pass 3: residual-overlap sweep, then clamp the level into view
        for prev, nid in zip(placed_order, placed_order[1:]):
            if final[nid] < final[prev] + pitch:
                final[nid] = final[prev] + pitch
        overshoot = final[placed_order[-1]] - margin_right
        if overshoot > 0:
            for nid in placed_order:
                final[nid] -= overshoot
        if final[placed_order[0]] < margin_left - 1e-9:
            raise LevelOverflow(level, len(by_level[level]) * pitch, width)

    band = cfg.node_height + cfg.level_gap
    return {
        nid: PositionedNode(
            node_id=nid, x=final[nid], y=tree.nodes[nid].level * band,
            level=tree.nodes[nid].level,
        )
        for nid in tree.nodes
    }


def fit_layout(
    tree: DiagramTree,
    cfg: LayoutConfig,
    min_node_width: float = MIN_FIT_NODE_WIDTH,
) -> tuple[dict[str, PositionedNode], LayoutConfig]:
    """Layout that shrinks node_width (never below min_node_width) to fit.

    Returns the positions and the config actually used, so callers can report
    the effective node size.
    """
    cfg.validate()
    counts: dict[int, int] = {}
    for node in tree.nodes.values():
        counts[node.level] = counts.get(node.level, 0) + 1
    widest = max(counts.values())

    allowed = cfg.viewport_width / widest - cfg.min_gap
    if allowed >= cfg.node_width:
        return layout(tree, cfg), cfg
    if allowed < min_node_width:
        level = max(counts, key=lambda lv: (counts[lv], -lv))
        raise LevelOverflow(
            level, counts[level] * (min_node_width + cfg.min_gap), cfg.viewport_width
        )
    shrunk = replace(cfg, node_width=allowed)
    return layout(tree, shrunk), shrunk


def edge_routes(
    positions: dict[str, PositionedNode], tree: DiagramTree, node_height: float
) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """One segment per parent-child pair: parent bottom-center to child top-center."""
    routes = []
    for node in tree.nodes.values():
        if node.parent_id is None:
            continue
        parent = positions[node.parent_id]
        child = positions[node.node_id]
        routes.append(
            ((parent.x, parent.y + node_height), (child.x, child.y))
        )
    return routes

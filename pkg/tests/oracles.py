"""Independent brute-force reference implementations used as test oracles.

Nothing here may call into the code paths it checks: the backtrack
classifier re-derives focus, click history and root paths from scratch at
every event; the aggregation oracle recomputes series from raw rows; the
layout oracle is a quadratic scan over node pairs.
"""

from __future__ import annotations

from typing import Sequence

from hypotree.model import InteractionEvent

GENERATION = ("branch_generate", "branch_regenerate")


# --- backtrack classification --------------------------------------------------


def _structure_upto(events: Sequence[InteractionEvent], upto: int):
    """(parents, levels) derived only from events[0:upto]."""
    parents: dict[str, str | None] = {}
    levels: dict[str, int] = {}
    for event in events[:upto]:
        if event.kind == "session_start":
            root = event.payload["root_id"]
            parents[root] = None
            levels[root] = 0
            for child in event.payload.get("created_node_ids", []):
                parents[child] = root
                levels[child] = 1
        elif event.kind in GENERATION:
            for child in event.payload.get("created_node_ids", []):
                parents[child] = event.node_id
                levels[child] = levels[event.node_id] + 1
    return parents, levels


def _focus_at(events: Sequence[InteractionEvent], upto: int) -> str:
    focus = events[0].payload["root_id"]
    for event in events[:upto]:
        if event.kind in ("node_click",) + GENERATION and event.node_id is not None:
            focus = event.node_id
    return focus


def _clicked_before(events: Sequence[InteractionEvent], upto: int) -> set[str]:
    return {
        e.node_id
        for e in events[:upto]
        if e.kind == "node_click" and e.node_id is not None
    }


def _path_to_root(parents: dict[str, str | None], node: str) -> list[str]:
    path = [node]
    while parents[path[-1]] is not None:
        path.append(parents[path[-1]])
    return path


def oracle_backtracks(events: Sequence[InteractionEvent]) -> dict[str, int]:
    """Category counts, re-deriving all state from scratch at every event."""
    counts = {
        "high_level_backtrack_and_generate": 0,
        "high_level_backtrack_only": 0,
        "other_backtrack": 0,
    }
    for i, event in enumerate(events):
        if event.kind != "node_click":
            continue
        target = event.node_id
        parents, levels = _structure_upto(events, i + 1)
        focus = _focus_at(events, i)
        if target not in _clicked_before(events, i):
            continue
        if target == focus:
            continue
        if target in _path_to_root(parents, focus):
            continue
        if parents[target] == parents[focus]:
            continue
        if levels[target] < levels[focus]:
            follows = None
            for later in events[i + 1 :]:
                if later.kind == "node_click":
                    follows = False
                    break
                if later.kind in GENERATION:
                    follows = later.node_id == target
                    break
            if follows:
                counts["high_level_backtrack_and_generate"] += 1
            else:
                counts["high_level_backtrack_only"] += 1
        else:
            counts["other_backtrack"] += 1
    return counts


# --- aggregation ---------------------------------------------------------------


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2


def oracle_aggregate(
    rows: list[tuple[str, ...]],
    x_idx: int,
    y_idx: int,
    group_idx: int | None,
    aggregate: str,
) -> dict[str, dict[object, float]]:
    """label -> x -> aggregated y, skipping rows with an empty relevant field."""

    def typed(value: str):
        try:
            number = float(value)
        except ValueError:
            return value
        return number if number == number and abs(number) != float("inf") else value

    buckets: dict[str, dict[object, list[float]]] = {}
    for row in rows:
        relevant = [row[x_idx], row[y_idx]]
        if group_idx is not None:
            relevant.append(row[group_idx])
        if any(v == "" for v in relevant):
            continue
        label = row[group_idx] if group_idx is not None else ""
        x = typed(row[x_idx])
        buckets.setdefault(label, {}).setdefault(x, []).append(
            float(row[y_idx]) if aggregate != "count" else 0.0
        )
    out: dict[str, dict[object, float]] = {}
    for label, groups in buckets.items():
        out[label] = {}
        for x, ys in groups.items():
            if aggregate == "count":
                out[label][x] = len(ys)
            elif aggregate == "sum":
                out[label][x] = sum(ys)
            elif aggregate == "mean":
                out[label][x] = sum(ys) / len(ys)
            elif aggregate == "median":
                out[label][x] = _median(ys)
    return out


# --- layout --------------------------------------------------------------------


def overlap_pairs(
    positions: dict[str, tuple[float, int]], pitch: float
) -> list[tuple[str, str]]:
    """All same-level pairs closer than the pitch. positions: id -> (x, level)."""
    bad = []
    ids = sorted(positions)
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            if positions[a][1] == positions[b][1]:
                if abs(positions[a][0] - positions[b][0]) < pitch - 1e-9:
                    bad.append((a, b))
    return bad


def subtree_size(parent_of: dict[str, str | None], root: str) -> int:
    """Nodes strictly below root, by exhaustive scan."""
    count = 0
    for node in parent_of:
        cursor = parent_of[node]
        while cursor is not None:
            if cursor == root:
                count += 1
                break
            cursor = parent_of[cursor]
    return count

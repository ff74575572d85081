"""Quantitative measures over exploration sessions.

Everything here is a pure read of an event log (plus the final tree for
structure metrics): diagram shape, exploration counts, the three-way
backtrack taxonomy, and visual-hypothesis engagement.

A click classifies as a backtrack when it revisits a previously clicked node
that is off the current focus's root path and not a sibling of the focus.
Backtracks to a smaller level split into "and generate" (the next branch
generation, before any other click, targets the revisited node) versus
"only"; every other backtrack is "other".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import CorruptLog
from .model import (
    EVENT_KINDS,
    DiagramTree,
    Focus,
    InteractionEvent,
    Session,
    list_bookmarks,
)

GENERATION_KINDS = frozenset({"branch_generate", "branch_regenerate"})

CATEGORY_AND_GENERATE = "high_level_backtrack_and_generate"
CATEGORY_ONLY = "high_level_backtrack_only"
CATEGORY_OTHER = "other_backtrack"


@dataclass(frozen=True)
class DiagramMetrics:
    node_count: int
    max_depth: int
    max_breadth: int
    nodes_by_level: dict[int, int]


@dataclass(frozen=True)
class ExplorationCounts:
    clicks: int
    generations: int
    total_explored: int


@dataclass(frozen=True)
class BacktrackInstance:
    event_id: int
    category: str
    from_node: str
    to_node: str


@dataclass(frozen=True)
class BacktrackReport:
    high_level_backtrack_and_generate: int
    high_level_backtrack_only: int
    other_backtrack: int
    total: int
    instances: tuple[BacktrackInstance, ...]


@dataclass(frozen=True)
class EngagementReport:
    initial_expansions: int
    re_expansions: int
    total: int


@dataclass
class TreeHistory:
    """Level and parentage of every node ever created in a session.

    Built by replaying the structural events; regenerated-away nodes stay
    resolvable so clicks recorded before their removal still classify.
    """

    root_id: str = ""
    parents: dict[str, str | None] = field(default_factory=dict)
    levels: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_events(cls, events: Sequence[InteractionEvent]) -> "TreeHistory":
        history = cls()
        for event in events:
            history.absorb(event)
        return history

    def absorb(self, event: InteractionEvent) -> None:
        if event.kind == "session_start":
            root_id = event.payload.get("root_id")
            if not root_id:
                raise CorruptLog("session_start lacks root_id", event.event_id)
            self.root_id = root_id
            self.parents[root_id] = None
            self.levels[root_id] = 0
            self._absorb_children(event, root_id)
        elif event.kind in GENERATION_KINDS:
            parent_id = event.node_id
            if parent_id is None or parent_id not in self.levels:
                raise CorruptLog("generation targets unknown node", event.event_id)
            self._absorb_children(event, parent_id)

    def _absorb_children(self, event: InteractionEvent, parent_id: str) -> None:
        for child_id in event.payload.get("created_node_ids", []):
            self.parents[child_id] = parent_id
            self.levels[child_id] = self.levels[parent_id] + 1

    def level(self, node_id: str, event_id: int) -> int:
        try:
            return self.levels[node_id]
        except KeyError:
            raise CorruptLog(f"unknown node {node_id}", event_id) from None

    def root_path(self, node_id: str) -> list[str]:
        path = [node_id]
        while self.parents[path[-1]] is not None:
            path.append(self.parents[path[-1]])  # type: ignore[arg-type]
        return path


def check_events(events: Sequence[InteractionEvent]) -> None:
    """Gap-free 1..N sequence, known kinds, session_start first."""
    for position, event in enumerate(events, start=1):
        if event.event_id != position:
            raise CorruptLog(
                f"sequence gap: expected {position}, got {event.event_id}",
                event.event_id,
            )
        if event.kind not in EVENT_KINDS:
            raise CorruptLog(f"unknown event kind {event.kind!r}", event.event_id)
    if events and events[0].kind != "session_start":
        raise CorruptLog("log does not begin with session_start", events[0].event_id)


def diagram_metrics(tree: DiagramTree) -> DiagramMetrics:
    """Structure of the live tree; superseded nodes are not counted."""
    by_level: dict[int, int] = {}
    for node in tree.nodes.values():
        by_level[node.level] = by_level.get(node.level, 0) + 1
    return DiagramMetrics(
        node_count=len(tree.nodes),
        max_depth=max(by_level),
        max_breadth=max(by_level.values()),
        nodes_by_level=dict(sorted(by_level.items())),
    )


def exploration_counts(events: Sequence[InteractionEvent]) -> ExplorationCounts:
    check_events(events)
    clicks = sum(1 for e in events if e.kind == "node_click")
    generations = sum(1 for e in events if e.kind in GENERATION_KINDS)
    return ExplorationCounts(
        clicks=clicks, generations=generations, total_explored=clicks + generations
    )


def classify_backtracks(
    events: Sequence[InteractionEvent], history: TreeHistory | None = None
) -> BacktrackReport:
    """Classify every revisit-click into the three backtrack categories.

    history defaults to one rebuilt from the events themselves, which carry
    all structural information.
    """
    check_events(events)
    if history is None:
        history = TreeHistory.from_events(events)

    focus = Focus(current_node_id=history.root_id)
    clicked: set[str] = set()
    instances: list[BacktrackInstance] = []

    for position, event in enumerate(events):
        if event.kind in GENERATION_KINDS and event.node_id is not None:
            history.level(event.node_id, event.event_id)
            focus.advance(event.kind, event.node_id)
            continue
        if event.kind != "node_click":
            continue
        target = event.node_id
        if target is None:
            raise CorruptLog("node_click without node_id", event.event_id)
        target_level = history.level(target, event.event_id)

        anchor = focus.current_node_id
        if target in clicked and _is_backtrack(history, target, anchor):
            if target_level < history.level(anchor, event.event_id):
                category = (
                    CATEGORY_AND_GENERATE
                    if _generates_next(events, position, target)
                    else CATEGORY_ONLY
                )
            else:
                category = CATEGORY_OTHER
            instances.append(
                BacktrackInstance(
                    event_id=event.event_id,
                    category=category,
                    from_node=anchor,
                    to_node=target,
                )
            )
        clicked.add(target)
        focus.advance(event.kind, target)

    counts = {CATEGORY_AND_GENERATE: 0, CATEGORY_ONLY: 0, CATEGORY_OTHER: 0}
    for instance in instances:
        counts[instance.category] += 1
    return BacktrackReport(
        high_level_backtrack_and_generate=counts[CATEGORY_AND_GENERATE],
        high_level_backtrack_only=counts[CATEGORY_ONLY],
        other_backtrack=counts[CATEGORY_OTHER],
        total=len(instances),
        instances=tuple(instances),
    )


def _is_backtrack(history: TreeHistory, target: str, focus: str) -> bool:
    if target == focus:
        return False
    if target in history.root_path(focus):
        return False
    return history.parents[target] != history.parents[focus]


def _generates_next(
    events: Sequence[InteractionEvent], position: int, target: str
) -> bool:
    for event in events[position + 1 :]:
        if event.kind == "node_click":
            return False
        if event.kind in GENERATION_KINDS:
            return event.node_id == target
    return False


def engagement(events: Sequence[InteractionEvent]) -> EngagementReport:
    """First vs repeat chart expansions per node; collapsing never resets."""
    check_events(events)
    seen: set[str] = set()
    initial = repeat = 0
    for event in events:
        if event.kind != "chart_expand" or event.node_id is None:
            continue
        if event.node_id in seen:
            repeat += 1
        else:
            seen.add(event.node_id)
            initial += 1
    return EngagementReport(
        initial_expansions=initial, re_expansions=repeat, total=initial + repeat
    )


def session_report(
    session: Session, events: Sequence[InteractionEvent]
) -> dict[str, Any]:
    """One document combining all measures plus the bookmarked hypotheses."""
    metrics = diagram_metrics(session.tree)
    counts = exploration_counts(events)
    backtracks = classify_backtracks(events)
    engaged = engagement(events)
    bookmarks = [
        {
            "participant": session.session_id,
            "title": node.title,
            "description": node.hypothesis_text,
            "level": node.level,
        }
        for node in list_bookmarks(session.tree)
    ]
    return {
        "session_id": session.session_id,
        "intent_text": session.intent_text,
        "diagram": {
            "node_count": metrics.node_count,
            "max_depth": metrics.max_depth,
            "max_breadth": metrics.max_breadth,
            "nodes_by_level": {str(k): v for k, v in metrics.nodes_by_level.items()},
        },
        "exploration": {
            "clicks": counts.clicks,
            "generations": counts.generations,
            "total_explored": counts.total_explored,
        },
        "backtracks": {
            "high_level_backtrack_and_generate": backtracks.high_level_backtrack_and_generate,
            "high_level_backtrack_only": backtracks.high_level_backtrack_only,
            "other_backtrack": backtracks.other_backtrack,
            "total": backtracks.total,
            "instances": [
                {
                    "event_id": i.event_id,
                    "category": i.category,
                    "from_node": i.from_node,
                    "to_node": i.to_node,
                }
                for i in backtracks.instances
            ],
        },
        "engagement": {
            "initial_expansions": engaged.initial_expansions,
            "re_expansions": engaged.re_expansions,
            "total": engaged.total,
        },
        "bookmarks": bookmarks,
    }


BACKTRACK_TABLE_HEADER = [
    "ID",
    "High Level Backtrack and Generate",
    "High Level Backtrack Only",
    "Other Backtrack",
    "Total",
]

ENGAGEMENT_TABLE_HEADER = [
    "ID",
    "Initial expansion of visual hypotheses",
    "Re-expansion of visual hypotheses",
    "Total",
]


def report_tables(report: dict[str, Any]) -> tuple[list[list[str]], list[list[str]]]:
    """Per-session backtrack and engagement tables (header row + one data row)."""
    backtracks = report["backtracks"]
    engaged = report["engagement"]
    backtrack_table = [
        BACKTRACK_TABLE_HEADER,
        [
            report["session_id"],
            str(backtracks["high_level_backtrack_and_generate"]),
            str(backtracks["high_level_backtrack_only"]),
            str(backtracks["other_backtrack"]),
            str(backtracks["total"]),
        ],
    ]
    engagement_table = [
        ENGAGEMENT_TABLE_HEADER,
        [
            report["session_id"],
            str(engaged["initial_expansions"]),
            str(engaged["re_expansions"]),
            str(engaged["total"]),
        ],
    ]
    return backtrack_table, engagement_table

"""Filesystem persistence: one directory per session, JSON artifacts.

Layout per session under the store root:

    <session_id>/
        session.json    session metadata + the layout config used
        diagram.json    {root_id, nodes:[...], layout:[...]} (canonical JSON)
        events.jsonl    append-only, one event per line, gap-free ids from 1
        dataset.csv     the ingested bytes, verbatim
        hints-cache/    per-node hint payloads

Canonical JSON (sorted keys, UTF-8, two-space indent, trailing newline) makes
byte-level golden and replay-equality tests possible. Diagram writes are
atomic (temp file + rename). Unknown keys found in a loaded diagram are kept
and re-emitted on the next save.

The event log is the source of truth: structural events carry the full
created node records, so replay_tree() rebuilds the exact tree and
load_session() falls back to it whenever diagram.json is missing or disagrees
with the log.
"""

from __future__ import annotations

import errno
import json
import os
from dataclasses import replace as dc_replace
from pathlib import Path
from typing import Any, Sequence

from filelock import FileLock

from .errors import (
    CorruptLog,
    PermissionDenied,
    SequenceGap,
    StorageFull,
    UnknownSession,
)
from .generation import HypothesisDraft
from .layout import LayoutConfig, PositionedNode
from .model import (
    DiagramTree,
    HypothesisNode,
    InteractionEvent,
    Session,
    add_children,
    descendant_ids,
    new_tree,
    replace_children,
    set_bookmark,
    validate_tree,
)

NODE_KEYS = (
    "node_id",
    "parent_id",
    "level",
    "title",
    "hypothesis",
    "visualization",
    "rationale",
    "relatedWork",
    "userInput",
    "bookmarked",
    "sibling_index",
)


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def node_to_dict(node: HypothesisNode) -> dict[str, Any]:
    record: dict[str, Any] = {
        "node_id": node.node_id,
        "parent_id": node.parent_id,
        "level": node.level,
        "title": node.title,
        "hypothesis": node.hypothesis_text,
        "visualization": node.visualization_idea,
        "rationale": node.rationale,
        "relatedWork": node.related_work,
        "userInput": node.user_input,
        "bookmarked": node.bookmarked,
        "sibling_index": node.sibling_index,
    }
    record.update(node.extra)
    return record


def node_from_dict(record: dict[str, Any]) -> HypothesisNode:
    return HypothesisNode(
        node_id=record["node_id"],
        parent_id=record["parent_id"],
        level=record["level"],
        title=record["title"],
        hypothesis_text=record.get("hypothesis", ""),
        visualization_idea=record.get("visualization", ""),
        rationale=record.get("rationale", ""),
        related_work=record.get("relatedWork", ""),
        user_input=record.get("userInput", ""),
        bookmarked=record.get("bookmarked", False),
        sibling_index=record.get("sibling_index", 0),
        extra={k: v for k, v in record.items() if k not in NODE_KEYS},
    )


def draft_from_node_dict(record: dict[str, Any], source_kind: str) -> HypothesisDraft:
    return HypothesisDraft(
        title=record["title"],
        hypothesis_text=record.get("hypothesis", ""),
        visualization_idea=record.get("visualization", ""),
        rationale=record.get("rationale", ""),
        related_work=record.get("relatedWork", ""),
        source_kind=source_kind,
    )


def tree_to_dict(tree: DiagramTree) -> dict[str, Any]:
    document: dict[str, Any] = {
        "root_id": tree.root_id,
        "nodes": [
            node_to_dict(tree.nodes[nid]) for nid in sorted(tree.nodes)
        ],
        "layout": [
            {"node_id": p.node_id, "x": p.x, "y": p.y, "level": p.level}
            for p in sorted(
                (tree.layout or {}).values(), key=lambda p: p.node_id
            )
        ],
    }
    document.update(tree.extra)
    return document


def tree_from_dict(document: dict[str, Any]) -> DiagramTree:
    nodes = {rec["node_id"]: node_from_dict(rec) for rec in document["nodes"]}
    layout = {
        rec["node_id"]: PositionedNode(
            node_id=rec["node_id"], x=rec["x"], y=rec["y"], level=rec["level"]
        )
        for rec in document.get("layout", [])
    }
    tree = DiagramTree(
        nodes=nodes,
        root_id=document["root_id"],
        layout=layout or None,
        extra={
            k: v for k, v in document.items() if k not in ("root_id", "nodes", "layout")
        },
    )
    for nid in nodes:
        if nid.startswith("n") and nid[1:].isdigit():
            tree.next_node_seq = max(tree.next_node_seq, int(nid[1:]) + 1)
    validate_tree(tree)
    return tree


def event_to_line(event: InteractionEvent) -> str:
    record: dict[str, Any] = {
        "event_id": event.event_id,
        "ts": event.timestamp,
        "kind": event.kind,
        "payload": event.payload,
    }
    if event.node_id is not None:
        record["node_id"] = event.node_id
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def event_from_line(line: str, session_id: str) -> InteractionEvent:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog(f"unparseable event line: {exc}") from None
    for key in ("event_id", "ts", "kind"):
        if key not in record:
            raise CorruptLog(f"event line missing {key!r}")
    return InteractionEvent(
        event_id=record["event_id"],
        timestamp=record["ts"],
        session_id=session_id,
        kind=record["kind"],
        node_id=record.get("node_id"),
        payload=record.get("payload", {}),
    )


def replay_tree(events: Sequence[InteractionEvent]) -> DiagramTree:
    """Rebuild the live tree from the structural events alone."""
    tree: DiagramTree | None = None
    for event in events:
        if event.kind == "session_start":
            payload = event.payload
            tree = new_tree(
                payload.get("intent_text", ""), root_id=payload.get("root_id")
            )
            _replay_children(tree, tree.root_id, event, replace=False)
        elif event.kind in ("branch_generate", "branch_regenerate"):
            if tree is None:
                raise CorruptLog("generation before session_start", event.event_id)
            _replay_children(
                tree, event.node_id, event, replace=event.kind == "branch_regenerate"
            )
        elif event.kind in ("bookmark_set", "bookmark_clear"):
            if tree is None or event.node_id is None:
                raise CorruptLog("bookmark before session_start", event.event_id)
            set_bookmark(tree, event.node_id, event.kind == "bookmark_set")
    if tree is None:
        raise CorruptLog("log contains no session_start")
    return tree


def _replay_children(
    tree: DiagramTree, parent_id: str | None, event: InteractionEvent, replace: bool
) -> None:
    if parent_id is None:
        raise CorruptLog("generation event without node_id", event.event_id)
    records = event.payload.get("created_nodes", [])
    node_ids = event.payload.get("created_node_ids", [])
    if len(records) != len(node_ids) or not records:
        raise CorruptLog("created_nodes and created_node_ids disagree", event.event_id)
    source = "initial" if event.kind == "session_start" else "branch"
    drafts = [draft_from_node_dict(rec, source) for rec in records]
    user_input = event.payload.get("user_input", "")
    if replace:
        removed = set(descendant_ids(tree, parent_id))
        recorded = set(event.payload.get("removed_node_ids", []))
        if removed != recorded:
            raise CorruptLog("removed_node_ids do not match the tree", event.event_id)
        replace_children(tree, parent_id, drafts, user_input, node_ids=node_ids)
    else:
        add_children(tree, parent_id, drafts, user_input, node_ids=node_ids)


class SessionStore:
    """One directory per session; a writer lock serializes mutation."""

    def __init__(self, root_dir: str | Path):
        self.root = Path(root_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._last_event_id: dict[str, int] = {}

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def list_sessions(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if (p / "session.json").is_file()
        )

    def exists(self, session_id: str) -> bool:
        return (self.session_dir(session_id) / "session.json").is_file()

    def writer_lock(self, session_id: str, timeout: float = 30.0) -> FileLock:
        """Cross-process writer lock; pair with any in-process serialization."""
        return FileLock(str(self.session_dir(session_id) / ".writer.lock"), timeout=timeout)

    def create_session(
        self,
        session: Session,
        dataset_bytes: bytes,
        layout_cfg: LayoutConfig,
    ) -> None:
        directory = self.session_dir(session.session_id)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "hints-cache").mkdir(exist_ok=True)
        _write_atomic(directory / "dataset.csv", dataset_bytes)
        metadata = {
            "session_id": session.session_id,
            "dataset_ref": session.dataset_ref,
            "intent_text": session.intent_text,
            "created_at": session.created_at,
            "event_log_ref": session.event_log_ref,
            "layout_config": {
                "viewport_width": layout_cfg.viewport_width,
                "node_width": layout_cfg.node_width,
                "node_height": layout_cfg.node_height,
                "min_gap": layout_cfg.min_gap,
                "level_gap": layout_cfg.level_gap,
            },
        }
        _write_atomic(
            directory / "session.json", canonical_json(metadata).encode("utf-8")
        )

    def save_diagram(self, session: Session) -> None:
        directory = self.session_dir(session.session_id)
        if not directory.is_dir():
            raise UnknownSession(session.session_id)
        payload = canonical_json(tree_to_dict(session.tree)).encode("utf-8")
        _write_atomic(directory / "diagram.json", payload)

    def append_event(self, session_id: str, event: InteractionEvent) -> None:
        log_path = self.session_dir(session_id) / "events.jsonl"
        if not log_path.parent.is_dir():
            raise UnknownSession(session_id)
        expected = self.last_event_id(session_id) + 1
        if event.event_id != expected:
            raise SequenceGap(expected, event.event_id)
        line = event_to_line(event) + "\n"
        try:
            with open(log_path, "a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise _map_os_error(exc) from exc
        self._last_event_id[session_id] = event.event_id

    def last_event_id(self, session_id: str) -> int:
        if session_id in self._last_event_id:
            return self._last_event_id[session_id]
        events = self.read_events(session_id)
        last = events[-1].event_id if events else 0
        self._last_event_id[session_id] = last
        return last

    def read_events(self, session_id: str) -> list[InteractionEvent]:
        log_path = self.session_dir(session_id) / "events.jsonl"
        if not log_path.is_file():
            return []
        events = []
        with open(log_path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    events.append(event_from_line(line, session_id))
        for position, event in enumerate(events, start=1):
            if event.event_id != position:
                raise CorruptLog(
                    f"sequence gap: expected {position}, got {event.event_id}",
                    event.event_id,
                )
        return events

    def layout_config(self, session_id: str) -> LayoutConfig:
        metadata = self._read_metadata(session_id)
        cfg = metadata.get("layout_config", {})
        return LayoutConfig(**cfg) if cfg else LayoutConfig()

    def _read_metadata(self, session_id: str) -> dict[str, Any]:
        path = self.session_dir(session_id) / "session.json"
        if not path.is_file():
            raise UnknownSession(session_id)
        return json.loads(path.read_text(encoding="utf-8"))

    def load_session(self, session_id: str) -> Session:
        """Reconstruct a session, rebuilding the tree by replay when the
        stored diagram is missing or disagrees with the event log."""
        metadata = self._read_metadata(session_id)
        events = self.read_events(session_id)
        replayed = replay_tree(events) if events else None

        tree: DiagramTree | None = None
        diagram_path = self.session_dir(session_id) / "diagram.json"
        if diagram_path.is_file():
            try:
                stored = tree_from_dict(
                    json.loads(diagram_path.read_text(encoding="utf-8"))
                )
            except (json.JSONDecodeError, KeyError, ValueError):
                stored = None
            if stored is not None:
                if replayed is None or _same_structure(stored, replayed):
                    tree = stored  # fresh: keep extras and stored layout
        if tree is None:
            if replayed is None:
                raise CorruptLog("session has neither diagram nor events")
            tree = replayed

        return Session(
            session_id=metadata["session_id"],
            dataset_ref=metadata["dataset_ref"],
            intent_text=metadata["intent_text"],
            tree=tree,
            created_at=metadata["created_at"],
            event_log_ref=metadata.get("event_log_ref", "events.jsonl"),
        )

    def dataset_bytes(self, session_id: str) -> bytes:
        path = self.session_dir(session_id) / "dataset.csv"
        if not path.is_file():
            raise UnknownSession(session_id)
        return path.read_bytes()

    # hint cache -----------------------------------------------------------

    def cached_hints(self, session_id: str, node_id: str) -> dict[str, Any] | None:
        path = self.session_dir(session_id) / "hints-cache" / f"{node_id}.json"
        if not path.is_file():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return None

    def cache_hints(self, session_id: str, node_id: str, payload: dict[str, Any]) -> None:
        directory = self.session_dir(session_id) / "hints-cache"
        directory.mkdir(parents=True, exist_ok=True)
        _write_atomic(
            directory / f"{node_id}.json", canonical_json(payload).encode("utf-8")
        )


def _same_structure(a: DiagramTree, b: DiagramTree) -> bool:
    """Node-level equality, ignoring layout and forward-compat extras."""

    def shape(tree: DiagramTree) -> str:
        stripped = DiagramTree(
            nodes={
                nid: dc_replace(node, extra={}) for nid, node in tree.nodes.items()
            },
            root_id=tree.root_id,
        )
        return canonical_json(tree_to_dict(stripped))

    return shape(a) == shape(b)


def _write_atomic(path: Path, data: bytes) -> None:
    temp_path = path.with_name(path.name + ".tmp")
    try:
        with open(temp_path, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_path, path)
    except OSError as exc:
        try:
            temp_path.unlink(missing_ok=True)
        except OSError:
            pass
        raise _map_os_error(exc) from exc


def _map_os_error(exc: OSError) -> Exception:
    if isinstance(exc, PermissionError):
        return PermissionDenied(str(exc))
    if exc.errno == errno.ENOSPC:
        return StorageFull(str(exc))
    return exc

"""HTTP JSON API for the exploration UI.

Endpoints mirror the exploration verbs: create a session (dataset upload +
intent, which triggers the initial 5-hypothesis generation), branch a node
(3 children), regenerate a branch, fetch hints (logs the node click), toggle
bookmarks, and read the analytics report.

Every mutating call appends exactly one structural event (hints append
node_click plus, with ?expand=true, chart_expand) before the diagram is
saved, so the event log replays to the persisted tree. Per-session mutation
is serialized; a second generation while one is in flight gets 409.

With mock_mode=true the provider and retriever run offline and session /
node ids are derived deterministically from the inputs, which keeps
fixture responses byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, File, Form, Query, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import analytics, hints, model, storage
from .errors import (
    AuthMissing,
    BusySession,
    CorruptLog,
    GenerationError,
    HintError,
    HypotreeError,
    IngestError,
    LevelOverflow,
    ProviderTimeout,
    ProviderUnavailable,
    RetrieverUnavailable,
    RootNotBookmarkable,
    RootNotBranchablePromptless,
    UnknownNode,
    UnknownSession,
)
from .generation import (
    ProviderConfig,
    build_branch_prompt,
    build_initial_prompt,
    generate,
    parse_branch_response,
    parse_initial_response,
)
from .hints import RetrieverConfig, compute_payload, derive_spec, fetch_supporting_text
from .ingest import DataSummary, DatasetHandle, ingest, summary_text
from .layout import LayoutConfig, fit_layout


@dataclass
class ApiConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    retriever: RetrieverConfig = field(default_factory=RetrieverConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    store_root: str = "./sessions"
    bind_address: str = "127.0.0.1"
    port: int = 8040
    mock_mode: bool = True

    def validate(self) -> None:
        if self.mock_mode:
            if self.provider.mode != "mock":
                raise ValueError("mock_mode requires a mock provider")
            if self.retriever.mode == "remote":
                raise ValueError("mock_mode requires an offline retriever")
        self.provider.validate()

    @classmethod
    def from_file(cls, path: str | Path) -> "ApiConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            provider=ProviderConfig(**raw.get("provider", {})),
            retriever=RetrieverConfig(**raw.get("retriever", {})),
            layout=LayoutConfig(**raw.get("layout", {})),
            store_root=raw.get("store_root", "./sessions"),
            bind_address=raw.get("bind_address", "127.0.0.1"),
            port=raw.get("port", 8040),
            mock_mode=raw.get("mock_mode", True),
        )


# --- wire schemas -------------------------------------------------------------


class NodeOut(BaseModel):
    node_id: str
    parent_id: str | None
    level: int
    title: str
    hypothesis: str
    visualization: str
    rationale: str
    relatedWork: str
    userInput: str
    bookmarked: bool
    sibling_index: int


class PositionOut(BaseModel):
    node_id: str
    x: float
    y: float
    level: int


class TreeOut(BaseModel):
    root_id: str
    nodes: list[NodeOut]


class ColumnOut(BaseModel):
    name: str
    dtype: str
    unique_count: int
    null_count: int
    min_value: float | None
    max_value: float | None
    sample_values: list[str]


class SummaryOut(BaseModel):
    name: str
    row_count: int
    columns: list[ColumnOut]


class SessionOut(BaseModel):
    session_id: str
    tree: TreeOut
    layout: list[PositionOut]
    summary: SummaryOut


class BranchIn(BaseModel):
    user_input: str | None = None


class BranchOut(BaseModel):
    new_nodes: list[NodeOut]
    layout: list[PositionOut]


class RegenerateOut(BaseModel):
    new_nodes: list[NodeOut]
    removed_count: int
    layout: list[PositionOut]


class SpecOut(BaseModel):
    chart_type: str
    x_field: str
    y_field: str | None
    aggregate: str
    group_field: str | None


class SeriesOut(BaseModel):
    label: str
    points: list[tuple[Any, Any]]


class ChartOut(BaseModel):
    spec: SpecOut
    series: list[SeriesOut]
    row_basis: int
    caption: str


class SnippetOut(BaseModel):
    source_title: str
    excerpt: str
    source_uri: str


class TextOut(BaseModel):
    query: str
    snippets: list[SnippetOut]


class HintsOut(BaseModel):
    chart: ChartOut | None
    text: TextOut | None
    warnings: list[str]


class BookmarkIn(BaseModel):
    flag: bool


# --- session manager ----------------------------------------------------------


class SessionManager:
    """Owns the store plus per-session locks, busy flags, and dataset cache."""

    def __init__(self, config: ApiConfig):
        config.validate()
        self.config = config
        self.store = storage.SessionStore(config.store_root)
        self._sessions: dict[str, model.Session] = {}
        self._datasets: dict[str, tuple[DataSummary, DatasetHandle]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._busy: set[str] = set()
        self._manager_lock = threading.Lock()

    # locking ----------------------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._manager_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    @contextmanager
    def _write_session(self, session_id: str):
        # threads serialize in-process; the lock file serializes across processes
        with self._lock_for(session_id):
            with self.store.writer_lock(session_id):
                yield

    def _enter_generation(self, session_id: str) -> None:
        with self._manager_lock:
            if session_id in self._busy:
                raise BusySession(session_id)
            self._busy.add(session_id)

    def _leave_generation(self, session_id: str) -> None:
        with self._manager_lock:
            self._busy.discard(session_id)

    # session access -----------------------------------------------------------

    def session(self, session_id: str) -> model.Session:
        if session_id not in self._sessions:
            self._sessions[session_id] = self.store.load_session(session_id)
        return self._sessions[session_id]

    def dataset(self, session_id: str) -> tuple[DataSummary, DatasetHandle]:
        if session_id not in self._datasets:
            session = self.session(session_id)
            data = self.store.dataset_bytes(session_id)
            self._datasets[session_id] = ingest(data, session.dataset_ref)
        return self._datasets[session_id]

    def _next_event(
        self, session_id: str, kind: str, node_id: str | None, payload: dict[str, Any]
    ) -> model.InteractionEvent:
        return model.InteractionEvent(
            event_id=self.store.last_event_id(session_id) + 1,
            timestamp=model.utc_now_rfc3339(),
            session_id=session_id,
            kind=kind,
            node_id=node_id,
            payload=payload,
        )

    def _positions(self, session: model.Session) -> list[dict[str, Any]]:
        positions, _ = fit_layout(session.tree, self.config.layout)
        session.tree.layout = positions
        return [
            {"node_id": p.node_id, "x": p.x, "y": p.y, "level": p.level}
            for p in sorted(positions.values(), key=lambda p: p.node_id)
        ]

    # operations ---------------------------------------------------------------

    def create_session(
        self, dataset_bytes: bytes, dataset_name: str, intent: str
    ) -> dict[str, Any]:
        if not intent.strip():
            raise ValueError("intent must be non-empty")
        summary, handle = ingest(dataset_bytes, dataset_name)

        if self.config.mock_mode:
            digest = hashlib.sha256(dataset_bytes + intent.encode("utf-8")).hexdigest()
            session_id = f"s{digest[:12]}"
        else:
            session_id = f"s{uuid.uuid4().hex[:12]}"
        if self.store.exists(session_id):
            raise FileExistsError(session_id)

        bundle = build_initial_prompt(summary_text(summary))
        drafts = parse_initial_response(generate(self.config.provider, bundle))

        tree = model.new_tree(intent)
        created = model.add_children(tree, tree.root_id, drafts)
        session = model.Session(
            session_id=session_id,
            dataset_ref=dataset_name or "dataset.csv",
            intent_text=intent,
            tree=tree,
            created_at=model.utc_now_rfc3339(),
        )
        self.store.create_session(session, dataset_bytes, self.config.layout)
        with self._write_session(session_id):
            event = self._next_event(
                session_id,
                "session_start",
                None,
                {
                    "intent_text": intent,
                    "root_id": tree.root_id,
                    "created_node_ids": created,
                    "created_nodes": [
                        storage.node_to_dict(tree.nodes[nid]) for nid in created
                    ],
                },
            )
            self.store.append_event(session_id, event)
            positions = self._positions(session)
            self.store.save_diagram(session)
        self._sessions[session_id] = session
        self._datasets[session_id] = (summary, handle)
        return {
            "session_id": session_id,
            "tree": _tree_out(session.tree),
            "layout": positions,
            "summary": _summary_out(summary),
        }

    def get_session(self, session_id: str) -> dict[str, Any]:
        session = self.session(session_id)
        summary, _ = self.dataset(session_id)
        with self._lock_for(session_id):
            positions = self._positions(session)
        return {
            "session_id": session_id,
            "tree": _tree_out(session.tree),
            "layout": positions,
            "summary": _summary_out(summary),
        }

    def branch(
        self, session_id: str, node_id: str, user_input: str | None
    ) -> dict[str, Any]:
        session = self.session(session_id)
        node = session.tree.node(node_id)
        if node.is_root:
            raise RootNotBranchablePromptless()

        self._enter_generation(session_id)
        try:
            bundle = build_branch_prompt(node, user_input)
            drafts = parse_branch_response(generate(self.config.provider, bundle))
            with self._write_session(session_id):
                created = model.add_children(
                    session.tree, node_id, drafts, user_input or ""
                )
                payload: dict[str, Any] = {
                    "created_node_ids": created,
                    "created_nodes": [
                        storage.node_to_dict(session.tree.nodes[nid]) for nid in created
                    ],
                }
                if user_input:
                    payload["user_input"] = user_input
                event = self._next_event(session_id, "branch_generate", node_id, payload)
                self.store.append_event(session_id, event)
                positions = self._positions(session)
                self.store.save_diagram(session)
        finally:
            self._leave_generation(session_id)
        return {
            "new_nodes": [
                storage.node_to_dict(session.tree.nodes[nid]) for nid in created
            ],
            "layout": positions,
        }

    def regenerate(
        self, session_id: str, node_id: str, user_input: str | None
    ) -> dict[str, Any]:
        session = self.session(session_id)
        node = session.tree.node(node_id)

        self._enter_generation(session_id)
        try:
            if node.is_root:
                summary, _ = self.dataset(session_id)
                bundle = build_initial_prompt(summary_text(summary))
                drafts = parse_initial_response(generate(self.config.provider, bundle))
            else:
                bundle = build_branch_prompt(node, user_input)
                drafts = parse_branch_response(generate(self.config.provider, bundle))
            with self._write_session(session_id):
                removed = model.descendant_ids(session.tree, node_id)
                created = model.replace_children(
                    session.tree, node_id, drafts, user_input or ""
                )
                payload = {
                    "created_node_ids": created,
                    "created_nodes": [
                        storage.node_to_dict(session.tree.nodes[nid]) for nid in created
                    ],
                    "removed_node_ids": removed,
                }
                if user_input:
                    payload["user_input"] = user_input
                event = self._next_event(
                    session_id, "branch_regenerate", node_id, payload
                )
                self.store.append_event(session_id, event)
                positions = self._positions(session)
                self.store.save_diagram(session)
        finally:
            self._leave_generation(session_id)
        return {
            "new_nodes": [
                storage.node_to_dict(session.tree.nodes[nid]) for nid in created
            ],
            "removed_count": len(removed),
            "layout": positions,
        }

    def hints_for(self, session_id: str, node_id: str, expand: bool) -> dict[str, Any]:
        session = self.session(session_id)
        node = session.tree.node(node_id)
        if node.is_root:
            raise UnknownNode(node_id)

        with self._write_session(session_id):
            click = self._next_event(session_id, "node_click", node_id, {})
            self.store.append_event(session_id, click)
            if expand:
                opened = self._next_event(session_id, "chart_expand", node_id, {})
                self.store.append_event(session_id, opened)

        cached = self.store.cached_hints(session_id, node_id)
        if cached is not None:
            return cached

        warnings: list[str] = []
        summary, handle = self.dataset(session_id)
        chart: dict[str, Any] | None = None
        try:
            spec = derive_spec(node, summary, self.config.provider)
            payload = compute_payload(spec, handle, caption=node.visualization_idea)
            chart = _chart_out(payload)
        except HintError as exc:
            warnings.append(f"chart unavailable: {exc}")
        except GenerationError as exc:
            warnings.append(f"chart unavailable: {exc}")

        text: dict[str, Any] | None = None
        try:
            supporting = fetch_supporting_text(node, self.config.retriever)
            text = {
                "query": supporting.query,
                "snippets": [
                    {
                        "source_title": s.source_title,
                        "excerpt": s.excerpt,
                        "source_uri": s.source_uri,
                    }
                    for s in supporting.snippets
                ],
            }
        except RetrieverUnavailable as exc:
            text = {"query": f"{node.title} {node.hypothesis_text}".strip(), "snippets": []}
            warnings.append(f"supporting text unavailable: {exc}")

        result = {"chart": chart, "text": text, "warnings": warnings}
        self.store.cache_hints(session_id, node_id, result)
        return result

    def bookmark(self, session_id: str, node_id: str, flag: bool) -> dict[str, Any]:
        session = self.session(session_id)
        with self._write_session(session_id):
            node = model.set_bookmark(session.tree, node_id, flag)
            kind = "bookmark_set" if flag else "bookmark_clear"
            event = self._next_event(session_id, kind, node_id, {})
            self.store.append_event(session_id, event)
            self.store.save_diagram(session)
        return storage.node_to_dict(node)

    def log_collapse(self, session_id: str, node_id: str) -> dict[str, Any]:
        session = self.session(session_id)
        node = session.tree.node(node_id)
        if node.is_root:
            raise UnknownNode(node_id)
        with self._write_session(session_id):
            event = self._next_event(session_id, "chart_collapse", node_id, {})
            self.store.append_event(session_id, event)
        return {"node_id": node_id, "logged": True}

    def analytics_report(self, session_id: str) -> dict[str, Any]:
        session = self.session(session_id)
        events = self.store.read_events(session_id)
        return analytics.session_report(session, events)


# --- serialization helpers -----------------------------------------------------


def _tree_out(tree: model.DiagramTree) -> dict[str, Any]:
    return {
        "root_id": tree.root_id,
        "nodes": [storage.node_to_dict(tree.nodes[nid]) for nid in sorted(tree.nodes)],
    }


def _summary_out(summary: DataSummary) -> dict[str, Any]:
    return {
        "name": summary.name,
        "row_count": summary.row_count,
        "columns": [
            {
                "name": c.name,
                "dtype": c.dtype,
                "unique_count": c.unique_count,
                "null_count": c.null_count,
                "min_value": c.min_value,
                "max_value": c.max_value,
                "sample_values": list(c.sample_values),
            }
            for c in summary.columns
        ],
    }


def _chart_out(payload: hints.ChartPayload) -> dict[str, Any]:
    return {
        "spec": asdict(payload.spec),
        "series": [
            {"label": s.label, "points": [list(p) for p in s.points]}
            for s in payload.series
        ],
        "row_basis": payload.row_basis,
        "caption": payload.caption,
    }


# --- FastAPI wiring -------------------------------------------------------------


def create_app(config: ApiConfig | None = None) -> FastAPI:
    manager = SessionManager(config or ApiConfig())
    app = FastAPI(title="hypotree", version="0.1.0")
    app.state.manager = manager
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(HypotreeError)
    async def _handle_domain_error(request, exc: HypotreeError):
        status = 500
        if isinstance(exc, (UnknownNode, UnknownSession)):
            status = 404
        elif isinstance(exc, BusySession):
            status = 409
        elif isinstance(
            exc, (ProviderUnavailable, ProviderTimeout, AuthMissing)
        ):
            status = 502
        elif isinstance(
            exc,
            (IngestError, RootNotBranchablePromptless, RootNotBookmarkable, LevelOverflow),
        ):
            status = 400
        elif isinstance(exc, CorruptLog):
            status = 500
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _handle_value_error(request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"error": "ValueError", "detail": str(exc)}
        )

    @app.exception_handler(FileExistsError)
    async def _handle_duplicate(request, exc: FileExistsError):
        return JSONResponse(
            status_code=409,
            content={"error": "DuplicateSession", "detail": str(exc)},
        )

    @app.post("/sessions", response_model=SessionOut)
    def create_session(
        dataset: UploadFile = File(...), intent: str = Form(...)
    ) -> Any:
        data = dataset.file.read()
        return manager.create_session(data, dataset.filename or "dataset.csv", intent)

    @app.get("/sessions/{session_id}", response_model=SessionOut)
    def get_session(session_id: str) -> Any:
        return manager.get_session(session_id)

    @app.post("/sessions/{session_id}/nodes/{node_id}/branch", response_model=BranchOut)
    def branch(session_id: str, node_id: str, body: BranchIn | None = None) -> Any:
        user_input = body.user_input if body else None
        return manager.branch(session_id, node_id, user_input)

    @app.post(
        "/sessions/{session_id}/nodes/{node_id}/regenerate",
        response_model=RegenerateOut,
    )
    def regenerate(session_id: str, node_id: str, body: BranchIn | None = None) -> Any:
        user_input = body.user_input if body else None
        return manager.regenerate(session_id, node_id, user_input)

    @app.get(
        "/sessions/{session_id}/nodes/{node_id}/hints", response_model=HintsOut
    )
    def node_hints(
        session_id: str, node_id: str, expand: bool = Query(default=False)
    ) -> Any:
        return manager.hints_for(session_id, node_id, expand)

    @app.post(
        "/sessions/{session_id}/nodes/{node_id}/bookmark", response_model=NodeOut
    )
    def bookmark(session_id: str, node_id: str, body: BookmarkIn) -> Any:
        return manager.bookmark(session_id, node_id, body.flag)

    @app.post("/sessions/{session_id}/nodes/{node_id}/collapse")
    def collapse(session_id: str, node_id: str) -> Any:
        return manager.log_collapse(session_id, node_id)

    @app.get("/sessions/{session_id}/analytics")
    def analytics_report(session_id: str) -> Any:
        return manager.analytics_report(session_id)

    @app.get("/schema")
    def schema() -> Any:
        return app.openapi()

    return app

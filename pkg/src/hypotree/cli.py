"""Command-line entry points: serve, analyze, replay, export.

analyze/replay/export operate on one session directory (the per-session
layout written by the store). Failures print a machine-readable JSON error
to stderr; corrupt logs exit with status 2, other errors with 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .analytics import report_tables, session_report
from .errors import CorruptLog, HypotreeError
from .service import ApiConfig, create_app
from .storage import SessionStore, canonical_json, replay_tree, tree_to_dict

RETRIEVER_URL_ENV = "HYPOTREE_RETRIEVER_URL"
CORPUS_DIR_ENV = "HYPOTREE_CORPUS_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypotree", description="Hypothesis-exploration engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--config", help="JSON config file")
    serve.add_argument("--mock", action="store_true", help="force offline providers")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--host", default=None)
    serve.add_argument("--store", default=None, help="session store directory")

    analyze = sub.add_parser("analyze", help="print a session's analytics report")
    analyze.add_argument("session_dir")
    analyze.add_argument("--format", choices=("json", "csv"), default="json")

    replay = sub.add_parser("replay", help="validate event-log determinism")
    replay.add_argument("session_dir")

    export = sub.add_parser("export", help="bundle diagram and report into one file")
    export.add_argument("session_dir")
    export.add_argument("out")
    return parser


def _open_session(session_dir: str):
    directory = Path(session_dir).resolve()
    if not (directory / "session.json").is_file():
        raise HypotreeError(f"{session_dir} is not a session directory")
    store = SessionStore(directory.parent)
    session = store.load_session(directory.name)
    events = store.read_events(directory.name)
    return store, session, events


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = ApiConfig.from_file(args.config) if args.config else ApiConfig()
    if args.mock:
        config.mock_mode = True
        config.provider.mode = "mock"
        config.retriever.mode = "offline"
    if args.store:
        config.store_root = args.store
    if args.port is not None:
        config.port = args.port
    if args.host is not None:
        config.bind_address = args.host
    if os.environ.get(RETRIEVER_URL_ENV):
        config.retriever.endpoint_url = os.environ[RETRIEVER_URL_ENV]
    if os.environ.get(CORPUS_DIR_ENV):
        config.retriever.corpus_dir = os.environ[CORPUS_DIR_ENV]

    app = create_app(config)
    uvicorn.run(app, host=config.bind_address, port=config.port)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    _, session, events = _open_session(args.session_dir)
    report = session_report(session, events)
    if args.format == "json":
        sys.stdout.write(canonical_json(report))
        return 0
    backtracks, engagement = report_tables(report)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    for row in backtracks:
        writer.writerow(row)
    sys.stdout.write("\n")
    for row in engagement:
        writer.writerow(row)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    directory = Path(args.session_dir).resolve()
    store, session, events = _open_session(args.session_dir)
    replayed = replay_tree(events)

    diagram_path = directory / "diagram.json"
    if diagram_path.is_file():
        stored = json.loads(diagram_path.read_text(encoding="utf-8"))
        replayed_doc = tree_to_dict(replayed)
        stored.pop("layout", None)
        replayed_doc.pop("layout", None)
        if canonical_json(stored) != canonical_json(replayed_doc):
            _emit_error("ReplayMismatch", "replayed tree differs from diagram.json")
            return 1
    print(
        f"replay OK: {len(events)} events -> {len(replayed.nodes)} nodes "
        f"(session {session.session_id})"
    )
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    _, session, events = _open_session(args.session_dir)
    bundle = {
        "diagram": tree_to_dict(session.tree),
        "report": session_report(session, events),
    }
    Path(args.out).write_text(canonical_json(bundle), encoding="utf-8")
    print(f"exported {args.out}")
    return 0


def _emit_error(kind: str, detail: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "detail": detail}) + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "analyze": cmd_analyze,
        "replay": cmd_replay,
        "export": cmd_export,
    }
    try:
        return handlers[args.command](args)
    except CorruptLog as exc:
        _emit_error("CorruptLog", str(exc))
        return 2
    except HypotreeError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except OSError as exc:
        _emit_error("OSError", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())

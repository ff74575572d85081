from __future__ import annotations

import csv as csv_module
import io
import json

import pytest
from fastapi.testclient import TestClient

from hypotree.cli import main
from hypotree.service import ApiConfig, create_app

from conftest import census_csv


@pytest.fixture
def session_dir(tmp_path):
    """A completed mock session on disk, built through the real API."""
    config = ApiConfig(store_root=str(tmp_path / "store"))
    client = TestClient(create_app(config))
    created = client.post(
        "/sessions",
        files={"dataset": ("census.csv", census_csv(), "text/csv")},
        data={"intent": "income inequality"},
    ).json()
    sid = created["session_id"]
    level1 = [n for n in created["tree"]["nodes"] if n["level"] == 1]
    client.get(f"/sessions/{sid}/nodes/{level1[0]['node_id']}/hints?expand=true")
    client.get(f"/sessions/{sid}/nodes/{level1[1]['node_id']}/hints")
    client.post(f"/sessions/{sid}/nodes/{level1[0]['node_id']}/branch")
    client.post(
        f"/sessions/{sid}/nodes/{level1[2]['node_id']}/bookmark", json={"flag": True}
    )
    return tmp_path / "store" / sid


class TestAnalyze:
    def test_json_format(self, session_dir, capsys):
        assert main(["analyze", str(session_dir)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["exploration"]["clicks"] == 2
        assert report["exploration"]["generations"] == 1
        assert report["engagement"]["initial_expansions"] == 1
        assert len(report["bookmarks"]) == 1

    def test_csv_format_has_appendix_table_shapes(self, session_dir, capsys):
        assert main(["analyze", str(session_dir), "--format", "csv"]) == 0
        out = capsys.readouterr().out
        backtrack_block, engagement_block = out.strip().split("\n\n")

        backtrack_rows = list(csv_module.reader(io.StringIO(backtrack_block)))
        assert backtrack_rows[0] == [
            "ID",
            "High Level Backtrack and Generate",
            "High Level Backtrack Only",
            "Other Backtrack",
            "Total",
        ]
        assert len(backtrack_rows) == 2
        counts = [int(v) for v in backtrack_rows[1][1:]]
        assert counts[-1] == sum(counts[:-1])

        engagement_rows = list(csv_module.reader(io.StringIO(engagement_block)))
        assert engagement_rows[0] == [
            "ID",
            "Initial expansion of visual hypotheses",
            "Re-expansion of visual hypotheses",
            "Total",
        ]
        assert engagement_rows[1][1:] == ["1", "0", "1"]

    def test_matches_http_analytics(self, session_dir, capsys):
        main(["analyze", str(session_dir)])
        offline = json.loads(capsys.readouterr().out)
        config = ApiConfig(store_root=str(session_dir.parent))
        client = TestClient(create_app(config))
        online = client.get(f"/sessions/{session_dir.name}/analytics").json()
        assert offline == online

    def test_truncated_log_exits_2(self, session_dir, capsys):
        log = session_dir / "events.jsonl"
        lines = log.read_text().splitlines()
        log.write_text("\n".join(lines[:1] + lines[2:]) + "\n", encoding="utf-8")
        assert main(["analyze", str(session_dir)]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "CorruptLog"

    def test_not_a_session_dir_exits_1(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path)]) == 1
        err = json.loads(capsys.readouterr().err)
        assert "error" in err


class TestReplay:
    def test_intact_fixture_exits_0(self, session_dir, capsys):
        assert main(["replay", str(session_dir)]) == 0
        assert "replay OK" in capsys.readouterr().out

    def test_tampered_diagram_exits_1(self, session_dir, capsys):
        diagram = session_dir / "diagram.json"
        document = json.loads(diagram.read_text())
        document["nodes"][1]["title"] = "tampered"
        diagram.write_text(json.dumps(document), encoding="utf-8")
        assert main(["replay", str(session_dir)]) == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ReplayMismatch"


class TestExport:
    def test_bundle_written(self, session_dir, tmp_path, capsys):
        out = tmp_path / "bundle.json"
        assert main(["export", str(session_dir), str(out)]) == 0
        bundle = json.loads(out.read_text())
        assert set(bundle) == {"diagram", "report"}
        assert bundle["diagram"]["root_id"]
        assert bundle["report"]["diagram"]["node_count"] == 9

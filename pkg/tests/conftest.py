from __future__ import annotations

import random

import pytest

from hypotree.model import InteractionEvent

TOY_CSV = b"age,job,score\n34,engineer,1\n28,teacher,2\n51,engineer,2\n"

CENSUS_ROWS = [
    ("39", "State-gov", "Bachelors", "Never-married", "Adm-clerical", "40", "<=50K"),
    ("50", "Self-emp", "Bachelors", "Married", "Exec-managerial", "13", "<=50K"),
    ("38", "Private", "HS-grad", "Divorced", "Handlers-cleaners", "40", "<=50K"),
    ("53", "Private", "11th", "Married", "Handlers-cleaners", "40", "<=50K"),
    ("28", "Private", "Bachelors", "Married", "Prof-specialty", "40", "<=50K"),
    ("37", "Private", "Masters", "Married", "Exec-managerial", "40", "<=50K"),
    ("49", "Private", "9th", "Widowed", "Other-service", "16", "<=50K"),
    ("52", "Self-emp", "HS-grad", "Married", "Exec-managerial", "45", ">50K"),
    ("31", "Private", "Masters", "Never-married", "Prof-specialty", "50", ">50K"),
    ("42", "Private", "Bachelors", "Married", "Exec-managerial", "40", ">50K"),
    ("37", "Private", "Some-college", "Married", "Exec-managerial", "80", ">50K"),
    ("30", "State-gov", "Bachelors", "Married", "Prof-specialty", "40", ">50K"),
    ("23", "Private", "Bachelors", "Never-married", "Adm-clerical", "30", "<=50K"),
    ("32", "Private", "Assoc-acdm", "Never-married", "Sales", "50", "<=50K"),
    ("40", "Private", "Assoc-voc", "Married", "Craft-repair", "40", ">50K"),
    ("34", "Private", "7th-8th", "Married", "Transport-moving", "45", "<=50K"),
    ("25", "Self-emp", "HS-grad", "Never-married", "Farming-fishing", "35", "<=50K"),
    ("32", "Private", "HS-grad", "Never-married", "Machine-op-inspct", "40", "<=50K"),
    ("38", "Private", "11th", "Married", "Sales", "50", "<=50K"),
    ("43", "Self-emp", "Masters", "Divorced", "Exec-managerial", "45", ">50K"),
    ("40", "Private", "Doctorate", "Married", "Prof-specialty", "60", ">50K"),
    ("54", "Private", "HS-grad", "Separated", "Other-service", "20", "<=50K"),
    ("35", "Federal-gov", "9th", "Married", "Farming-fishing", "40", "<=50K"),
    ("43", "Private", "Masters", "Married", "Exec-managerial", "50", ">50K"),
    ("59", "Private", "HS-grad", "Divorced", "Tech-support", "40", "<=50K"),
    ("56", "Local-gov", "Bachelors", "Married", "Tech-support", "40", ">50K"),
    ("19", "Private", "HS-grad", "Never-married", "Craft-repair", "40", "<=50K"),
    ("54", "Private", "Some-college", "Married", "Sales", "60", ">50K"),
    ("39", "Private", "HS-grad", "Divorced", "Exec-managerial", "80", "<=50K"),
    ("49", "Private", "HS-grad", "Married", "Craft-repair", "40", ">50K"),
]

CENSUS_HEADER = "age,workclass,education,marital_status,occupation,hours_per_week,income"


def census_csv() -> bytes:
    lines = [CENSUS_HEADER] + [",".join(row) for row in CENSUS_ROWS]
    return ("\n".join(lines) + "\n").encode("utf-8")


@pytest.fixture
def toy_csv_bytes() -> bytes:
    return TOY_CSV


@pytest.fixture
def census_csv_bytes() -> bytes:
    return census_csv()


def ev(
    event_id: int,
    kind: str,
    node_id: str | None = None,
    payload: dict | None = None,
    session_id: str = "s-test",
) -> InteractionEvent:
    return InteractionEvent(
        event_id=event_id,
        timestamp="2026-01-01T00:00:00.000Z",
        session_id=session_id,
        kind=kind,
        node_id=node_id,
        payload=payload or {},
    )


def start_events(child_count: int = 5) -> tuple[list[InteractionEvent], list[str]]:
    """A session_start event creating `child_count` level-1 nodes under root r0."""
    children = [f"c{i}" for i in range(child_count)]
    event = ev(
        1,
        "session_start",
        payload={"root_id": "r0", "created_node_ids": children},
    )
    return [event], children


class LogBuilder:
    """Synthetic, structurally valid event logs for analytics tests."""

    def __init__(self, initial: int = 5):
        self.counter = 0
        self.events, self.live = start_events(initial)
        self.live = ["r0"] + self.live
        self.parents: dict[str, str | None] = {"r0": None}
        for child in self.events[0].payload["created_node_ids"]:
            self.parents[child] = "r0"
        self.next_id = 2
        self.node_seq = initial

    def _new_nodes(self, count: int, parent: str) -> list[str]:
        ids = []
        for _ in range(count):
            self.node_seq += 1
            nid = f"c{self.node_seq}"
            ids.append(nid)
            self.parents[nid] = parent
            self.live.append(nid)
        return ids

    def click(self, node: str) -> "LogBuilder":
        self.events.append(ev(self.next_id, "node_click", node))
        self.next_id += 1
        return self

    def branch(self, node: str, count: int = 3) -> list[str]:
        created = self._new_nodes(count, node)
        self.events.append(
            ev(self.next_id, "branch_generate", node, {"created_node_ids": created})
        )
        self.next_id += 1
        return created

    def regenerate(self, node: str, count: int = 3) -> list[str]:
        removed = [
            n for n in self.live if n != node and self._has_ancestor(n, node)
        ]
        for nid in removed:
            self.live.remove(nid)
        created = self._new_nodes(count, node)
        self.events.append(
            ev(
                self.next_id,
                "branch_regenerate",
                node,
                {"created_node_ids": created, "removed_node_ids": removed},
            )
        )
        self.next_id += 1
        return created

    def expand(self, node: str) -> "LogBuilder":
        self.events.append(ev(self.next_id, "chart_expand", node))
        self.next_id += 1
        return self

    def collapse(self, node: str) -> "LogBuilder":
        self.events.append(ev(self.next_id, "chart_collapse", node))
        self.next_id += 1
        return self

    def _has_ancestor(self, node: str, ancestor: str) -> bool:
        cursor = self.parents.get(node)
        while cursor is not None:
            if cursor == ancestor:
                return True
            cursor = self.parents.get(cursor)
        return False


def random_log(seed: int, steps: int | None = None) -> list[InteractionEvent]:
    """A structurally valid random exploration log for oracle comparisons."""
    rng = random.Random(seed)
    builder = LogBuilder()
    for _ in range(steps if steps is not None else rng.randint(3, 40)):
        roll = rng.random()
        non_root = [n for n in builder.live if n != "r0"]
        if roll < 0.55:
            builder.click(rng.choice(builder.live))
        elif roll < 0.75 and non_root:
            builder.branch(rng.choice(non_root))
        elif roll < 0.82:
            target = rng.choice(builder.live)
            builder.regenerate(target, 5 if target == "r0" else 3)
        elif roll < 0.93 and non_root:
            builder.expand(rng.choice(non_root))
        elif non_root:
            builder.collapse(rng.choice(non_root))
    return builder.events

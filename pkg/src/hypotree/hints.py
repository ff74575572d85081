"""Information hints for a clicked node: a data-grounded chart and supporting text.

Charts are declarative: a ChartSpec names columns and an aggregation, the
server computes the series. Specs are validated against the dataset summary
before any computation, so a chart payload can always be rendered from its
series alone.

Validation rules (mirrored by the property tests):
  - chart_type in {bar, line, scatter, histogram, box}; aggregate in
    {none, count, mean, median, sum};
  - every referenced field exists in the summary;
  - y_field is required except for histogram (which forbids it);
  - bar forbids aggregate=none; histogram requires numeric x and aggregate
    none; box requires numeric y, aggregate none and no group_field;
  - mean/median/sum require a numeric y_field.

Supporting text comes from a retrieval endpoint, or offline from a directory
of plain-text files ranked by the sum of IDF-weighted shared tokens
(idf = ln(doc_count / docs_containing_token)).
"""

from __future__ import annotations

import json
import math
import random
import re
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .errors import (
    MalformedResponse,
    NoMappableColumns,
    RetrieverUnavailable,
    SpecDatasetMismatch,
)
from .generation import ProviderConfig, remote_completion
from .ingest import DataSummary, DatasetHandle, parse_number
from .model import HypothesisNode

CHART_TYPES = ("bar", "line", "scatter", "histogram", "box")
AGGREGATES = ("none", "count", "mean", "median", "sum")

SCATTER_POINT_CAP = 2000
SCATTER_SAMPLE_SEED = 7
SNIPPET_CAP = 3
EXCERPT_LENGTH = 400


@dataclass(frozen=True)
class ChartSpec:
    chart_type: str
    x_field: str
    y_field: str | None = None
    aggregate: str = "none"
    group_field: str | None = None


@dataclass(frozen=True)
class Series:
    label: str
    points: tuple[tuple[object, object], ...]


@dataclass(frozen=True)
class ChartPayload:
    spec: ChartSpec
    series: tuple[Series, ...]
    row_basis: int
    caption: str


@dataclass(frozen=True)
class Snippet:
    source_title: str
    excerpt: str
    source_uri: str


@dataclass(frozen=True)
class SupportingText:
    snippets: tuple[Snippet, ...]
    query: str


@dataclass
class RetrieverConfig:
    mode: str = "offline"  # offline | remote
    endpoint_url: str | None = None
    corpus_dir: str | None = None
    top_k: int = SNIPPET_CAP
    timeout: float = 10.0
    max_retries: int = 2


def validate_spec(spec: ChartSpec, summary: DataSummary) -> None:
    """Raise SpecDatasetMismatch unless the spec can run against the summary."""
    if spec.chart_type not in CHART_TYPES:
        raise SpecDatasetMismatch(f"unknown chart type {spec.chart_type!r}")
    if spec.aggregate not in AGGREGATES:
        raise SpecDatasetMismatch(f"unknown aggregate {spec.aggregate!r}")

    def profile(field_name: str, role: str):
        col = summary.column(field_name)
        if col is None:
            raise SpecDatasetMismatch(f"{role} {field_name!r} is not a dataset column")
        return col

    x_col = profile(spec.x_field, "x_field")
    if spec.group_field is not None:
        profile(spec.group_field, "group_field")

    if spec.chart_type == "histogram":
        if spec.y_field is not None:
            raise SpecDatasetMismatch("histogram takes no y_field")
        if spec.aggregate != "none":
            raise SpecDatasetMismatch("histogram takes no aggregate")
        if x_col.dtype != "numeric":
            raise SpecDatasetMismatch(
                f"histogram needs a numeric x_field, {spec.x_field!r} is {x_col.dtype}"
            )
        return

    if spec.y_field is None:
        raise SpecDatasetMismatch(f"{spec.chart_type} requires a y_field")
    y_col = profile(spec.y_field, "y_field")

    if spec.chart_type == "bar" and spec.aggregate == "none":
        raise SpecDatasetMismatch("bar charts require an aggregate")
    if spec.aggregate in ("mean", "median", "sum") and y_col.dtype != "numeric":
        raise SpecDatasetMismatch(
            f"aggregate {spec.aggregate} needs a numeric y_field, "
            f"{spec.y_field!r} is {y_col.dtype}"
        )
    if spec.chart_type == "box":
        if y_col.dtype != "numeric":
            raise SpecDatasetMismatch("box plots need a numeric y_field")
        if spec.aggregate != "none":
            raise SpecDatasetMismatch("box plots compute their own statistics")
        if spec.group_field is not None:
            raise SpecDatasetMismatch("box plots do not take a group_field")


# --- chart computation -------------------------------------------------------


def _typed(value: str) -> object:
    number = parse_number(value)
    return number if number is not None else value


def _sort_key(value: object):
    return (0, value, "") if isinstance(value, float) else (1, 0.0, str(value))


def compute_payload(
    spec: ChartSpec, dataset: DatasetHandle, caption: str = ""
) -> ChartPayload:
    """Aggregate the dataset into renderable series for a validated spec.

    Rows with an empty value in any referenced field are skipped; row_basis
    counts the rows that remain. Scatter samples at most 2,000 of them with a
    fixed seed; histograms use Sturges' bin count.
    """
    fields = [spec.x_field]
    if spec.y_field is not None:
        fields.append(spec.y_field)
    if spec.group_field is not None:
        fields.append(spec.group_field)
    try:
        columns = [dataset.column(f) for f in fields]
    except KeyError as exc:
        raise SpecDatasetMismatch(f"column {exc.args[0]!r} missing from dataset") from None

    rows = [row for row in zip(*columns) if all(v != "" for v in row)]
    row_basis = len(rows)

    if spec.chart_type == "histogram":
        series = _histogram_series(spec, rows)
    elif spec.chart_type == "box":
        series = _box_series(rows)
    elif spec.aggregate == "none":
        series = _point_series(spec, rows)
    else:
        series = _aggregate_series(spec, rows)
    return ChartPayload(
        spec=spec, series=tuple(series), row_basis=row_basis, caption=caption
    )


def _histogram_series(spec: ChartSpec, rows: list[tuple[str, ...]]) -> list[Series]:
    values = sorted(parse_number(r[0]) for r in rows)  # type: ignore[type-var]
    if not values:
        return []
    lo, hi = values[0], values[-1]
    bins = max(1, math.ceil(math.log2(len(values))) + 1) if len(values) > 1 else 1
    if hi == lo:
        return [Series(label=spec.x_field, points=((lo, len(values)),))]
    width = (hi - lo) / bins
    counts = [0] * bins
    for v in values:
        idx = min(int((v - lo) / width), bins - 1)
        counts[idx] += 1
    points = tuple(
        (lo + (i + 0.5) * width, counts[i]) for i in range(bins)
    )
    return [Series(label=spec.x_field, points=points)]


def _box_series(rows: list[tuple[str, ...]]) -> list[Series]:
    groups: dict[object, list[float]] = {}
    for row in rows:
        groups.setdefault(_typed(row[0]), []).append(parse_number(row[1]))  # type: ignore[arg-type]
    if not groups:
        return []
    keys = sorted(groups, key=_sort_key)
    stats: dict[str, list[tuple[object, object]]] = {
        name: [] for name in ("min", "q1", "median", "q3", "max")
    }
    for key in keys:
        values = sorted(groups[key])
        if len(values) == 1:
            q1 = median = q3 = values[0]
        else:
            q1, median, q3 = statistics.quantiles(values, n=4, method="inclusive")
        stats["min"].append((key, values[0]))
        stats["q1"].append((key, q1))
        stats["median"].append((key, median))
        stats["q3"].append((key, q3))
        stats["max"].append((key, values[-1]))
    return [Series(label=name, points=tuple(pts)) for name, pts in stats.items()]


def _point_series(spec: ChartSpec, rows: list[tuple[str, ...]]) -> list[Series]:
    if spec.chart_type == "scatter" and len(rows) > SCATTER_POINT_CAP:
        rng = random.Random(SCATTER_SAMPLE_SEED)
        keep = sorted(rng.sample(range(len(rows)), SCATTER_POINT_CAP))
        rows = [rows[i] for i in keep]
    grouped: dict[str, list[tuple[object, object]]] = {}
    for row in rows:
        label = row[2] if spec.group_field is not None else (spec.y_field or "")
        grouped.setdefault(label, []).append((_typed(row[0]), _typed(row[1])))
    labels = sorted(grouped)
    if spec.chart_type == "line":
        for pts in grouped.values():
            pts.sort(key=lambda p: _sort_key(p[0]))
    return [Series(label=lb, points=tuple(grouped[lb])) for lb in labels]


def _aggregate_series(spec: ChartSpec, rows: list[tuple[str, ...]]) -> list[Series]:
    grouped: dict[str, dict[object, list[float]]] = {}
    for row in rows:
        label = row[-1] if spec.group_field is not None else _agg_label(spec)
        x = _typed(row[0])
        y = parse_number(row[1]) if spec.aggregate != "count" else 0.0
        grouped.setdefault(label, {}).setdefault(x, []).append(y)  # type: ignore[arg-type]
    out = []
    for label in sorted(grouped):
        points = []
        for x in sorted(grouped[label], key=_sort_key):
            bucket = grouped[label][x]
            if spec.aggregate == "count":
                points.append((x, len(bucket)))
            elif spec.aggregate == "mean":
                points.append((x, sum(bucket) / len(bucket)))
            elif spec.aggregate == "median":
                points.append((x, statistics.median(bucket)))
            else:
                points.append((x, sum(bucket)))
        out.append(Series(label=label, points=tuple(points)))
    return out


def _agg_label(spec: ChartSpec) -> str:
    if spec.aggregate == "count":
        return "count"
    return f"{spec.aggregate}({spec.y_field})"


# --- spec derivation ----------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def derive_spec(
    node: HypothesisNode, summary: DataSummary, provider: ProviderConfig
) -> ChartSpec:
    """Map a node's visualization idea onto a validated ChartSpec.

    Mock mode uses a keyword heuristic over the idea text; remote mode asks
    the provider for a spec object. An invalid first answer gets one
    corrective retry (mock: retried over idea + hypothesis text), after which
    the token-overlap fallback takes over.
    """
    idea = node.visualization_idea.strip()
    if not idea:
        raise NoMappableColumns("the node has no visualization idea")

    attempts = (
        [idea, f"{idea} {node.hypothesis_text}"]
        if provider.mode == "mock"
        else [None, None]
    )
    for attempt_text in attempts:
        try:
            if provider.mode == "mock":
                spec = _heuristic_spec(attempt_text, summary)
            else:
                spec = _remote_spec(node, summary, provider)
            if spec is not None:
                validate_spec(spec, summary)
                return spec
        except SpecDatasetMismatch:
            continue
    return _fallback_spec(node, summary)


def _column_mentions(text: str, summary: DataSummary) -> list[str]:
    """Columns whose full token sequence occurs in the text, by first position."""
    tokens = tokenize(text)
    found: list[tuple[int, str]] = []
    for col in summary.columns:
        name_tokens = tokenize(col.name)
        if not name_tokens:
            continue
        for i in range(len(tokens) - len(name_tokens) + 1):
            if tokens[i : i + len(name_tokens)] == name_tokens:
                found.append((i, col.name))
                break
    found.sort()
    return [name for _, name in found]


def _heuristic_spec(idea: str, summary: DataSummary) -> ChartSpec | None:
    lowered = idea.lower()
    chart = "scatter"
    for keyword, kind in (
        ("histogram", "histogram"),
        ("scatter", "scatter"),
        ("bar", "bar"),
        ("line", "line"),
        ("box", "box"),
    ):
        if keyword in lowered:
            chart = kind
            break

    mentions = _column_mentions(idea, summary)
    if not mentions:
        return None
    # "y by x" / "y over x" phrasing puts the grouping column on the right
    split = re.split(r"\b(?:by|over)\b", lowered, maxsplit=1)
    if len(split) == 2 and len(mentions) >= 2:
        right = _column_mentions(split[1], summary)
        left = [c for c in _column_mentions(split[0], summary) if c not in right]
        if right and left:
            mentions = [right[0], left[0]]

    def is_numeric(name: str) -> bool:
        col = summary.column(name)
        return col is not None and col.dtype == "numeric"

    if chart == "histogram":
        numeric = [c for c in mentions if is_numeric(c)]
        if not numeric:
            return None
        return ChartSpec(chart_type="histogram", x_field=numeric[0])
    if len(mentions) < 2:
        return None
    x, y = mentions[0], mentions[1]
    if chart == "scatter":
        return ChartSpec(chart_type="scatter", x_field=x, y_field=y)
    if chart == "box":
        if is_numeric(y):
            return ChartSpec(chart_type="box", x_field=x, y_field=y)
        if is_numeric(x):
            return ChartSpec(chart_type="box", x_field=y, y_field=x)
        return None
    aggregate = "mean" if is_numeric(y) else "count"
    return ChartSpec(chart_type=chart, x_field=x, y_field=y, aggregate=aggregate)


def _remote_spec(
    node: HypothesisNode, summary: DataSummary, provider: ProviderConfig
) -> ChartSpec | None:
    column_lines = "\n".join(
        f"- {c.name} ({c.dtype})" for c in summary.columns
    )
    system_text = (
        "You turn a chart idea into a JSON chart specification. Respond with "
        "a single JSON object with keys chart_type (bar|line|scatter|"
        "histogram|box), x_field, y_field, aggregate (none|count|mean|median|"
        "sum) and optional group_field. Field values must be column names "
        "from the list given."
    )
    user_text = (
        f"Chart idea: {node.visualization_idea}\n"
        f"Hypothesis: {node.hypothesis_text}\n"
        f"Columns:\n{column_lines}"
    )
    try:
        raw = remote_completion(provider, system_text, user_text)
        data = json.loads(raw.strip().strip("`"))
    except (MalformedResponse, json.JSONDecodeError):
        return None
    if not isinstance(data, dict):
        return None
    return ChartSpec(
        chart_type=str(data.get("chart_type", "")),
        x_field=str(data.get("x_field", "")),
        y_field=None if data.get("y_field") in (None, "") else str(data["y_field"]),
        aggregate=str(data.get("aggregate", "none")),
        group_field=(
            None if data.get("group_field") in (None, "") else str(data["group_field"])
        ),
    )


def _fallback_spec(node: HypothesisNode, summary: DataSummary) -> ChartSpec:
    """Scatter/bar over the two columns overlapping the hypothesis text most."""
    text_tokens = set(tokenize(f"{node.visualization_idea} {node.hypothesis_text}"))
    scored: list[tuple[int, int, str]] = []
    for order, col in enumerate(summary.columns):
        overlap = len(set(tokenize(col.name)) & text_tokens)
        if overlap > 0:
            scored.append((-overlap, order, col.name))
    scored.sort()
    if not scored:
        raise NoMappableColumns()

    def is_numeric(name: str) -> bool:
        col = summary.column(name)
        return col is not None and col.dtype == "numeric"

    names = [name for _, _, name in scored[:2]]
    if len(names) == 1:
        only = names[0]
        if is_numeric(only):
            return ChartSpec(chart_type="histogram", x_field=only)
        return ChartSpec(chart_type="bar", x_field=only, y_field=only, aggregate="count")
    a, b = names
    if is_numeric(a) and is_numeric(b):
        return ChartSpec(chart_type="scatter", x_field=a, y_field=b)
    if is_numeric(b):
        return ChartSpec(chart_type="bar", x_field=a, y_field=b, aggregate="mean")
    if is_numeric(a):
        return ChartSpec(chart_type="bar", x_field=b, y_field=a, aggregate="mean")
    return ChartSpec(chart_type="bar", x_field=a, y_field=b, aggregate="count")


# --- supporting text ----------------------------------------------------------


def fetch_supporting_text(node: HypothesisNode, cfg: RetrieverConfig) -> SupportingText:
    """Retrieve up to 3 supporting snippets for a node; empty is a valid result.

    Raises RetrieverUnavailable only for remote transport failures; callers
    degrade that to an absent hint plus a warning.
    """
    query = f"{node.title} {node.hypothesis_text}".strip()
    if cfg.mode == "remote":
        return _remote_snippets(query, cfg)
    return _offline_snippets(query, cfg)


def _remote_snippets(query: str, cfg: RetrieverConfig) -> SupportingText:
    if not cfg.endpoint_url:
        raise RetrieverUnavailable("no endpoint configured")
    last_error: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        if attempt:
            time.sleep(min(0.5 * 2 ** (attempt - 1), 4.0))
        try:
            response = httpx.post(
                cfg.endpoint_url,
                json={"query": query, "top_k": cfg.top_k},
                timeout=cfg.timeout,
            )
        except httpx.HTTPError as exc:
            last_error = exc
            continue
        if response.status_code >= 500:
            last_error = RetrieverUnavailable(f"HTTP {response.status_code}")
            continue
        if response.status_code >= 400:
            raise RetrieverUnavailable(f"HTTP {response.status_code}")
        passages = response.json().get("passages", [])
        snippets = tuple(
            Snippet(
                source_title=str(p.get("title", "")),
                excerpt=str(p.get("text", ""))[:EXCERPT_LENGTH],
                source_uri=str(p.get("uri", "")),
            )
            for p in passages[:SNIPPET_CAP]
            if str(p.get("text", ""))
        )
        return SupportingText(snippets=snippets, query=query)
    raise RetrieverUnavailable(str(last_error))


def _offline_snippets(query: str, cfg: RetrieverConfig) -> SupportingText:
    if not cfg.corpus_dir:
        return SupportingText(snippets=(), query=query)
    corpus_path = Path(cfg.corpus_dir)
    if not corpus_path.is_dir():
        return SupportingText(snippets=(), query=query)

    docs = sorted(corpus_path.glob("*.txt"))
    texts = {doc: doc.read_text(encoding="utf-8") for doc in docs}
    token_sets = {doc: set(tokenize(text)) for doc, text in texts.items()}
    doc_count = len(docs)
    if doc_count == 0:
        return SupportingText(snippets=(), query=query)

    def idf(token: str) -> float:
        df = sum(1 for s in token_sets.values() if token in s)
        return math.log(doc_count / df) if df else 0.0

    query_tokens = set(tokenize(query))
    ranked: list[tuple[float, str, Path]] = []
    for doc in docs:
        shared = query_tokens & token_sets[doc]
        if shared:
            ranked.append((-sum(idf(t) for t in shared), doc.name, doc))
    ranked.sort()

    limit = min(SNIPPET_CAP, cfg.top_k)
    snippets = []
    for _, _, doc in ranked[:limit]:
        shared = query_tokens & token_sets[doc]
        best = max(shared, key=lambda t: (idf(t), t))
        text = texts[doc]
        match = re.search(re.escape(best), text, re.IGNORECASE)
        pos = match.start() if match else 0
        start = max(0, pos + len(best) - EXCERPT_LENGTH)
        excerpt = text[start : start + EXCERPT_LENGTH]
        if excerpt:
            snippets.append(
                Snippet(
                    source_title=doc.stem,
                    excerpt=excerpt,
                    source_uri=doc.resolve().as_uri(),
                )
            )
    return SupportingText(snippets=tuple(snippets), query=query)

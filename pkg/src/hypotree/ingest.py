"""Delimited-file ingestion and per-column profiling.

Produces the DataSummary that grounds generation prompts and validates chart
specs, plus a read-only DatasetHandle for row-level access during chart
computation. Parsing is deliberately bit-predictable: comma delimiter with
standard quoting, no sniffing, UTF-8 (BOM tolerated).

dtype inference scans all values of a column, first rule that holds wins:
numeric -> boolean -> datetime -> categorical (unique_count <= max(20, 5% of
rows)) -> text. Empty strings are the only null sentinel; a single stray
non-numeric value demotes an otherwise numeric column instead of erroring.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import datetime

from .errors import DuplicateHeader, EmptyFile, RaggedRows

DTYPES = ("numeric", "categorical", "boolean", "datetime", "text")

CATEGORICAL_UNIQUE_FLOOR = 20  # chosen cutoffs, see module docstring
CATEGORICAL_ROW_FRACTION = 0.05
SAMPLE_VALUE_CAP = 5

_BOOL_TOKENS = {"true", "false", "0", "1"}


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    dtype: str
    unique_count: int
    null_count: int
    min_value: float | None = None
    max_value: float | None = None
    sample_values: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataSummary:
    name: str
    row_count: int
    columns: tuple[ColumnProfile, ...]

    def column(self, name: str) -> ColumnProfile | None:
        for col in self.columns:
            if col.name == name:
                return col
        return None

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]


@dataclass
class DatasetHandle:
    """Read-only row access for chart computation; safe to share across threads."""

    name: str
    header: list[str]
    rows: list[tuple[str, ...]] = field(repr=False, default_factory=list)

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        try:
            idx = self.header.index(name)
        except ValueError:
            raise KeyError(name) from None
        return [row[idx] for row in self.rows]


def parse_number(value: str) -> float | None:
    """Finite float for a numeric-looking string, else None."""
    try:
        number = float(value)
    except ValueError:
        return None
    return number if math.isfinite(number) else None


def parse_iso_datetime(value: str) -> datetime | None:
    text = value[:-1] + "+00:00" if value.endswith(("Z", "z")) else value
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        return None


def ingest(data: bytes, name: str) -> tuple[DataSummary, DatasetHandle]:
    """Parse comma-delimited UTF-8 content into a summary and a row handle."""
    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFile("file has no header row") from None
    if not header or all(h.strip() == "" for h in header):
        raise EmptyFile("file has no header row")

    seen: set[str] = set()
    for col in header:
        if col in seen:
            raise DuplicateHeader(col)
        seen.add(col)

    rows: list[tuple[str, ...]] = []
    width = len(header)
    for record_no, record in enumerate(reader, start=2):
        if not record:
            continue  # blank line
        if len(record) != width:
            raise RaggedRows(record_no, width, len(record))
        rows.append(tuple(record))
    if not rows:
        raise EmptyFile()

    handle = DatasetHandle(name=name, header=list(header), rows=rows)
    columns = tuple(
        _profile_column(col, handle.column(col), len(rows)) for col in header
    )
    return DataSummary(name=name, row_count=len(rows), columns=columns), handle


def _profile_column(name: str, values: list[str], row_count: int) -> ColumnProfile:
    non_null = [v for v in values if v != ""]
    null_count = len(values) - len(non_null)

    distinct: list[str] = []
    seen: set[str] = set()
    for v in non_null:
        if v not in seen:
            seen.add(v)
            distinct.append(v)
    unique_count = len(distinct)

    dtype = _infer_dtype(non_null, distinct, row_count)
    min_value = max_value = None
    if dtype == "numeric" and non_null:
        numbers = [parse_number(v) for v in non_null]
        finite = [n for n in numbers if n is not None]
        if finite:
            min_value, max_value = min(finite), max(finite)

    return ColumnProfile(
        name=name,
        dtype=dtype,
        unique_count=unique_count,
        null_count=null_count,
        min_value=min_value,
        max_value=max_value,
        sample_values=tuple(distinct[:SAMPLE_VALUE_CAP]),
    )


def _infer_dtype(non_null: list[str], distinct: list[str], row_count: int) -> str:
    if all(parse_number(v) is not None for v in non_null):
        return "numeric"
    if all(v.lower() in _BOOL_TOKENS for v in non_null):
        return "boolean"
    if non_null and all(parse_iso_datetime(v) is not None for v in non_null):
        return "datetime"
    cutoff = max(CATEGORICAL_UNIQUE_FLOOR, CATEGORICAL_ROW_FRACTION * row_count)
    return "categorical" if len(distinct) <= cutoff else "text"


def format_bound(value: float) -> str:
    """Render a numeric bound without a trailing .0 for integral values."""
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def summary_text(summary: DataSummary) -> str:
    """Deterministic single-string rendering used verbatim in prompts.

    One line per column, order preserved from the input file; numeric columns
    show min/max, every other dtype shows sample values.
    """
    lines = [
        f"Dataset: {summary.name}",
        f"Rows: {summary.row_count}",
        "Columns:",
    ]
    for col in summary.columns:
        head = f"- {col.name} ({col.dtype}): unique={col.unique_count}, nulls={col.null_count}"
        if col.dtype == "numeric" and col.min_value is not None and col.max_value is not None:
            head += f", min={format_bound(col.min_value)}, max={format_bound(col.max_value)}"
        else:
            head += ", samples=" + ", ".join(col.sample_values)
        lines.append(head)
    return "\n".join(lines)

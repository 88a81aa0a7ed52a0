"""Deterministic scan tables and their CSV/JSON serialization."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field

from .errors import IoFailure

TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = "float"  # "float" | "int" | "str"


@dataclass
class ScanTable:
    """Ordered scan records plus the metadata needed to reproduce them."""

    metadata: dict[str, str] = field(default_factory=dict)
    columns: list[Column] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)

    def column_index(self, name: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name == name:
                return i
        raise KeyError(name)

    def column_values(self, name: str) -> list:
        i = self.column_index(name)
        return [row[i] for row in self.rows]


def _format_cell(value, kind: str) -> str:
    if value is None:
        return "NaN" if kind == "float" else ""
    if kind == "float":
        v = float(value)
        if math.isnan(v):
            return "NaN"
        return f"{v:.17g}"
    if kind == "int":
        return str(int(value))
    return str(value)


def render_csv(table: ScanTable) -> str:
    lines = [f"# {key}={value}" for key, value in table.metadata.items()]
    lines.append(",".join(col.name for col in table.columns))
    for row in table.rows:
        lines.append(",".join(_format_cell(v, c.kind) for v, c in zip(row, table.columns)))
    return "\n".join(lines) + "\n"


def render_json(table: ScanTable) -> str:
    def cell(value, kind):
        if value is None:
            return None
        if kind == "float":
            v = float(value)
            return None if math.isnan(v) else v
        return int(value) if kind == "int" else str(value)

    payload = {
        "meta": dict(table.metadata),
        "columns": [{"name": c.name, "kind": c.kind} for c in table.columns],
        "rows": [[cell(v, c.kind) for v, c in zip(row, table.columns)] for row in table.rows],
    }
    return json.dumps(payload, indent=1, allow_nan=False) + "\n"


def emit_table(table: ScanTable, fmt: str = "csv", destination: str | None = None) -> None:
    """Write a table as CSV or JSON; '-' or None means stdout. LF endings."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    text = render_csv(table) if fmt == "csv" else render_json(table)
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {destination}: {exc}") from exc

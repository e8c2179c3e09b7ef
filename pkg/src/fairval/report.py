"""Report tables and their CSV / JSON / console renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path


@dataclass
class Table:
    """A named table; ``sources`` maps each column to the operation that fills it."""

    name: str
    columns: list
    sources: dict
    rows: list = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))


def machine_cell(v) -> str:
    """Full precision: shortest round-trip repr for floats, exact text otherwise."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def json_cell(v):
    if isinstance(v, (Decimal, Fraction)):
        return str(v)
    return v


def human_cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return machine_cell(v)
    if isinstance(v, Decimal):
        return f"{v:,.2f}"
    if isinstance(v, (float, Fraction)):
        x = float(v)
        # deviations and tolerances would all print as 0.00
        if x != 0 and abs(x) < 0.005:
            return f"{x:.2e}"
        return f"{x:,.2f}"
    return str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([machine_cell(v) for v in row])
    return buf.getvalue()


def to_json(table: Table) -> str:
    doc = {
        "table": table.name,
        "columns": table.columns,
        "rows": [{c: json_cell(v) for c, v in zip(table.columns, row)} for row in table.rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render_human(table: Table, max_rows: int = 50) -> str:
    cells = [table.columns] + [[human_cell(v) for v in row] for row in table.rows[:max_rows]]
    widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
    lines = [f"== {table.name} =="]
    for r in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    if len(table.rows) > max_rows:
        lines.append(f"... ({len(table.rows) - max_rows} more rows)")
    return "\n".join(lines)


def write_report(out_dir: Path, header: dict, tables: list, fmt: str = "csv") -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    header = dict(header, columns={t.name: t.sources for t in tables})
    path = out_dir / "header.json"
    path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)
    for t in tables:
        path = out_dir / f"{t.name}.{fmt}"
        path.write_text(to_csv(t) if fmt == "csv" else to_json(t), encoding="utf-8")
        written.append(path)
    return written

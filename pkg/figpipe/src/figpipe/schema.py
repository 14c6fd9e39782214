"""CSV contracts and validated loading.

The pipeline is read-only over its inputs and never imports the simulator;
these column lists are the whole interface.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

SWEEP_COLUMNS = (
    "scenario_id",
    "policy",
    "axis_name",
    "axis_value",
    "run_count",
    "mean_cost",
    "mean_backlog",
    "backlog_variance",
    "regret_eq9",
    "regret_vs_gs",
    "wallclock_s",
)

CURVE_COLUMNS = (
    "scenario_id",
    "policy",
    "v",
    "beta",
    "run_count",
    "t",
    "regret_eq9",
    "regret_vs_gs",
)

_SWEEP_FLOATS = (
    "axis_value",
    "mean_cost",
    "mean_backlog",
    "backlog_variance",
    "regret_eq9",
    "regret_vs_gs",
    "wallclock_s",
)
_CURVE_FLOATS = ("v", "beta", "regret_eq9", "regret_vs_gs")


class SchemaError(ValueError):
    """The CSV does not conform to the documented contract."""


@dataclass
class Table:
    columns: tuple
    rows: list  # list of dicts


def _read(path, columns, float_cols, int_cols):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}; expected {list(columns)}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            row = dict(raw)
            try:
                for c in float_cols:
                    row[c] = float(raw[c])
                for c in int_cols:
                    row[c] = int(raw[c])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}:{lineno}: unparsable value ({exc})") from exc
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(columns, rows)


def load_sweep(path, expected_axis: str) -> Table:
    """Load a sweep CSV and require a single, expected axis."""
    table = _read(path, SWEEP_COLUMNS, _SWEEP_FLOATS, ("run_count",))
    axes = {r["axis_name"] for r in table.rows}
    if axes != {expected_axis}:
        raise SchemaError(f"{path}: expected axis_name == {expected_axis!r}, found {sorted(axes)}")
    return table


def load_curves(path) -> Table:
    """Load a regret-over-time CSV; time must strictly increase per curve."""
    table = _read(path, CURVE_COLUMNS, _CURVE_FLOATS, ("run_count", "t"))
    seen = {}
    for row in table.rows:
        key = (row["policy"], row["v"], row["beta"])
        last = seen.get(key)
        if last is not None and row["t"] <= last:
            raise SchemaError(f"{path}: non-monotone time column for {key} (t={row['t']} after {last})")
        seen[key] = row["t"]
    return table


def regret_column(rows) -> str:
    """Prefer the oracle-based regret; fall back to the clairvoyant proxy when absent."""
    if any(not math.isnan(r["regret_eq9"]) for r in rows):
        return "regret_eq9"
    return "regret_vs_gs"

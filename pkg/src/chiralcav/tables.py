"""Deterministic tabular output: CSV/JSON writers and the round-trip reader.

CSV conventions: '.' decimal point, ',' separator, '#'-prefixed metadata
header lines, values formatted to a fixed number of significant digits
(12 by default) so repeated runs are byte-identical.  Spectral features
are appended as '# feature,kind,delta,value,width' comment rows so plain
numeric parsers skip them while the reader recovers them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_DIGITS = 12


@dataclass(frozen=True)
class DataTable:
    """One named table: column labels, float rows and flat metadata."""

    name: str
    columns: tuple[str, ...]
    rows: np.ndarray  # shape (n_rows, n_columns)
    meta: dict[str, str] = field(default_factory=dict)
    features: tuple[tuple[str, float, float, float], ...] = ()


def fmt(value: float, digits: int = DEFAULT_DIGITS) -> str:
    """Format one float with a fixed significant-digit budget."""
    return format(float(value), f".{digits}g")


def render_csv(table: DataTable, digits: int = DEFAULT_DIGITS) -> str:
    lines = [f"# {key} = {val}" for key, val in table.meta.items()]
    lines.append(",".join(table.columns))
    for row in np.atleast_2d(table.rows):
        lines.append(",".join(fmt(v, digits) for v in row))
    for kind, delta, value, width in table.features:
        lines.append(
            f"# feature,{kind},{fmt(delta, digits)},{fmt(value, digits)},{fmt(width, digits)}"
        )
    return "\n".join(lines) + "\n"


def render_json(table: DataTable, digits: int = DEFAULT_DIGITS) -> str:
    payload = {
        "name": table.name,
        "meta": dict(table.meta),
        "columns": list(table.columns),
        "rows": [[float(fmt(v, digits)) for v in row] for row in np.atleast_2d(table.rows)],
        "features": [
            {
                "kind": kind,
                "delta": float(fmt(delta, digits)),
                "value": float(fmt(value, digits)),
                "width": float(fmt(width, digits)),
            }
            for kind, delta, value, width in table.features
        ],
    }
    return json.dumps(payload, indent=None, sort_keys=True, separators=(",", ":")) + "\n"


def write_table(table: DataTable, path, fmt_name: str = "csv", digits: int = DEFAULT_DIGITS) -> None:
    if fmt_name == "csv":
        text = render_csv(table, digits)
    elif fmt_name == "json":
        text = render_json(table, digits)
    else:
        raise ValueError(f"unknown output format: {fmt_name!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def parse_csv(text: str, name: str = "") -> DataTable:
    """Invert :func:`render_csv` (to the emitted precision)."""
    meta: dict[str, str] = {}
    features: list[tuple[str, float, float, float]] = []
    columns: tuple[str, ...] | None = None
    rows: list[list[float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("feature,"):
                _, kind, d, v, w = body.split(",")
                features.append((kind, float(d), float(v), float(w)))
            elif "=" in body:
                key, _, val = body.partition("=")
                meta[key.strip()] = val.strip()
            continue
        if columns is None:
            columns = tuple(line.split(","))
        else:
            rows.append([float(tok) for tok in line.split(",")])
    if columns is None:
        raise ValueError("CSV text contains no header row")
    return DataTable(
        name=name,
        columns=columns,
        rows=np.asarray(rows, dtype=float),
        meta=meta,
        features=tuple(features),
    )


def read_table(path) -> DataTable:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    name = str(path).rsplit("/", 1)[-1]
    if name.endswith(".json"):
        payload = json.loads(text)
        return DataTable(
            name=payload.get("name", name),
            columns=tuple(payload["columns"]),
            rows=np.asarray(payload["rows"], dtype=float),
            meta={k: str(v) for k, v in payload.get("meta", {}).items()},
            features=tuple(
                (f["kind"], f["delta"], f["value"], f["width"])
                for f in payload.get("features", [])
            ),
        )
    return parse_csv(text, name=name.removesuffix(".csv"))

"""Deterministic rendering of command reports as tables, JSON or CSV.

A report is a mapping ``{verb, inputs, params, results, provenance}``.
``results`` holds scalars (and small nested mappings); an optional ``rows``
entry inside ``results`` is a list of flat records rendered as a table.
Floats are rounded to 9 significant digits before rendering, and non-finite
values are written as the strings ``"inf"``, ``"-inf"`` and ``"nan"`` so that
JSON stays standard and re-parses to the same rendered table.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

FORMATS = ("table", "json", "csv")


def _num(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.9g}")


def normalize(obj: Any) -> Any:
    """JSON-ready copy with rounded floats and stable container types."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, complex):
        return [_num(obj.real), _num(obj.imag)]
    return obj


def cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.9g}"
    if v is None:
        return ""
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=False, separators=(",", ":"))
    return str(v)


def _aligned(header: Sequence[str], rows: Sequence[Sequence[str]]) -> List[str]:
    widths = [len(h) for h in header]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    fmt = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
    out = [fmt(header), fmt(["-" * w for w in widths])]
    out += [fmt(r) for r in rows]
    return out


def _flatten(prefix: str, obj: Any, out: List[tuple]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    else:
        out.append((prefix, obj))


def render_table(doc: Dict[str, Any]) -> str:
    doc = normalize(doc)
    lines = [f"verb: {doc['verb']}"]
    for section in ("inputs", "params"):
        items: List[tuple] = []
        _flatten("", doc.get(section, {}), items)
        for k, v in items:
            lines.append(f"{section[:-1] if section == 'inputs' else 'param'} {k}: {cell(v)}")
    results = dict(doc.get("results", {}))
    rows = results.pop("rows", None)
    columns = results.pop("columns", None)
    items = []
    _flatten("", results, items)
    if items:
        lines += _aligned(["quantity", "value"], [[k, cell(v)] for k, v in items])
    if rows is not None:
        columns = columns or (list(rows[0].keys()) if rows else [])
        lines.append("")
        lines += _aligned(columns, [[cell(r.get(c)) for c in columns] for r in rows])
    return "\n".join(lines) + "\n"


def render_json(doc: Dict[str, Any]) -> str:
    return json.dumps(normalize(doc), indent=2, sort_keys=False, allow_nan=False) + "\n"


def render_csv(doc: Dict[str, Any], columns: Optional[Sequence[str]] = None) -> str:
    """One header row plus data rows.

    If ``results`` has ``rows`` those are written (header only when empty);
    otherwise the flattened scalar results form a single row, restricted to
    ``columns`` (or ``results['columns']``) when given.
    """
    doc = normalize(doc)
    results = dict(doc.get("results", {}))
    rows = results.pop("rows", None)
    cols = results.pop("columns", None)
    columns = list(columns or cols or [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows is not None:
        columns = columns or (list(rows[0].keys()) if rows else [])
        w.writerow(columns)
        for r in rows:
            w.writerow([cell(r.get(c)) for c in columns])
        return buf.getvalue()
    items: List[tuple] = []
    _flatten("", results, items)
    flat = dict(items)
    columns = columns or list(flat)
    w.writerow(columns)
    w.writerow([cell(flat.get(c)) for c in columns])
    return buf.getvalue()


def emit(doc: Dict[str, Any], fmt: str = "table", csv_columns: Optional[Sequence[str]] = None) -> str:
    if fmt == "table":
        return render_table(doc)
    if fmt == "json":
        return render_json(doc)
    if fmt == "csv":
        return render_csv(doc, csv_columns)
    raise ValueError(f"unknown format {fmt!r}")


__all__ = ["FORMATS", "cell", "emit", "normalize", "render_csv", "render_json", "render_table"]

"""CSV / JSON emission with numbers as decimal strings."""

from __future__ import annotations

import csv
import io
import json

from mpmath.libmp import repr_dps

__all__ = ["format_value", "emit", "parse_csv", "parse_json"]


def format_value(v, digits=None):
    """Decimal string for mpf values, plain ``str`` for other numbers;
    booleans, None and strings pass through.

    By default mpf values get enough digits to round-trip the binary value
    exactly (a few more than the working precision); ``digits`` overrides.
    """
    if isinstance(v, bool):
        return v
    if hasattr(v, "_mpf_"):
        ctx = v.context
        return ctx.nstr(v, digits or repr_dps(ctx.prec))
    if isinstance(v, (list, tuple)):
        return [format_value(x, digits) for x in v]
    if isinstance(v, dict):
        return {k: format_value(x, digits) for k, x in v.items()}
    if v is None or isinstance(v, str):
        return v
    return str(v)


def emit(rows, columns, config: dict, summary: dict | None = None, fmt: str = "csv",
         digits=None, version: str = "") -> str:
    """Serialise ``rows`` (dicts keyed by ``columns``).

    CSV: a ``#`` header block (tool version, config echo as sorted JSON,
    summary) followed by the header row and data rows. JSON: an object
    ``{"config", "rows", "summary"}``. Output depends only on the inputs.
    """
    summary = {} if summary is None else summary
    clean_rows = [{c: format_value(r.get(c), digits) for c in columns} for r in rows]
    clean_summary = format_value(summary, digits)
    if fmt == "json":
        doc = {"config": config, "rows": clean_rows, "summary": clean_summary, "version": version}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write(f"# sclaguerre {version}\n")
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    for k in sorted(clean_summary):
        buf.write(f"# {k}: {json.dumps(clean_summary[k])}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in clean_rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def parse_csv(text: str):
    """(config, header comment lines, rows as dicts of strings)."""
    lines = text.splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    config = {}
    for ln in comments:
        if ln.startswith("# config: "):
            config = json.loads(ln[len("# config: "):])
    rows = list(csv.DictReader(io.StringIO("\n".join(body)))) if body else []
    return config, comments, rows


def parse_json(text: str):
    return json.loads(text)

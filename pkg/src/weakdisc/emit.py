"""
Row serialization: CSV (RFC 4180, '#' metadata comments) and JSON lines
(metadata preamble object).  Floats are written with 17 significant digits
so they parse back bit-identically; unbounded values are the string ``inf``.
"""
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .imperfections import RNG_ALGORITHM
from .sweep import FIELDS

FORMATS = ("csv", "jsonl")


def metadata(seed, **extra):
    meta = {"artifact_version": __version__, "seed": seed, "rng_algorithm": RNG_ALGORITHM}
    meta.update(extra)
    return meta


def _format_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return _format_value(v)
    return v


def render(rows, fmt="csv", meta=None, fields=FIELDS):
    """Serialize ``rows`` (an iterable of dicts) to a string."""
    meta = meta or {}
    buf = io.StringIO(newline="")
    if fmt == "csv":
        for key, value in meta.items():
            buf.write(f"# {key}: {value}\r\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_format_value(row.get(f)) for f in fields])
    elif fmt == "jsonl":
        buf.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for row in rows:
            buf.write(json.dumps({f: _json_value(row.get(f)) for f in fields}) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return buf.getvalue()


def emit(rows, fmt="csv", destination=None, meta=None, fields=FIELDS):
    """Write rows to ``destination`` (a path) or to standard output when it is None."""
    text = render(rows, fmt, meta, fields)
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(Path(destination), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_cell(text):
    if text == "":
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_csv(text):
    """Inverse of :func:`render` for CSV: returns ``(meta, rows)``."""
    meta = {}
    body = []
    for line in text.splitlines(keepends=True):
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        else:
            body.append(line)
    reader = csv.reader(io.StringIO("".join(body), newline=""))
    header = next(reader, None)
    if header is None:
        return meta, []
    rows = [dict(zip(header, (_parse_cell(c) for c in rec))) for rec in reader]
    return meta, rows


def parse_jsonl(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return {}, []
    meta = json.loads(lines[0])["meta"]
    rows = []
    for ln in lines[1:]:
        row = json.loads(ln)
        rows.append({k: float(v) if v in ("inf", "-inf", "nan") else v for k, v in row.items()})
    return meta, rows


def data_section(text, fmt="csv"):
    """Output with metadata removed, for determinism comparisons."""
    if fmt == "csv":
        return "".join(ln for ln in text.splitlines(keepends=True) if not ln.startswith("#"))
    return "".join(text.splitlines(keepends=True)[1:])

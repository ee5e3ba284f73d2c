"""JSON report documents and point files.

Floats are written with 17 significant digits so that every value reloads
bit-for-bit; complex matrices are row-major nested lists of ``[re, im]``
pairs.  Wall-clock timing lives under a single top-level ``timing`` key so
documents can be compared with it removed.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

SCHEMA = "qham-report/1"


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise ValueError("matrix must be a nested list of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def encode_point(x) -> list:
    return [encode_matrix(c) for c in x]


def _format_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = format(v, ".17g")
    if s in ("0", "-0"):
        return "0.0"
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to plain JSON-compatible values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_matrix(obj) if obj.ndim == 2 else [_plain(v) for v in obj]
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _dump(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        # lists without nested objects (matrices, residual series) stay on one line
        if not any(isinstance(v, dict) for v in _leaves(obj)) or not obj:
            out.append(_inline(obj))
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(_inline(obj))


def _leaves(v):
    if isinstance(v, list):
        for w in v:
            yield from _leaves(w)
    else:
        yield v


def _inline(v):
    if isinstance(v, list):
        return "[" + ", ".join(_inline(w) for w in v) + "]"
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return _format_float(v)
    if isinstance(v, int):
        return str(v)
    return json.dumps(v if isinstance(v, str) else str(v))


def dumps(doc) -> str:
    """Deterministic text form of a report document."""
    out: list[str] = []
    _dump(_plain(doc), 2, 0, out)
    return "".join(out) + "\n"


def loads(text: str):
    def restore(v):
        if isinstance(v, dict):
            return {k: restore(w) for k, w in v.items()}
        if isinstance(v, list):
            return [restore(w) for w in v]
        if v in ("nan", "inf", "-inf"):
            return float(v)
        return v
    return restore(json.loads(text))


def without_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timing"}


def write_report(doc, path) -> None:
    Path(path).write_text(dumps(doc))


def write_points(points, path) -> None:
    Path(path).write_text(dumps([encode_point(x) for x in points]))


def read_points(path) -> list[tuple]:
    """Load a point file: a list of points, each a list of matrices (a single point is accepted)."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not data:
        raise ValueError("point file must hold a non-empty JSON list")
    depth = np.asarray(data[0], dtype=float).ndim if _rectangular(data[0]) else None
    if depth == 3:  # a single point: list of matrices
        data = [data]
    points = []
    for p in data:
        points.append(tuple(decode_matrix(m) for m in p))
    return points


def _rectangular(v):
    try:
        np.asarray(v, dtype=float)
    except ValueError:
        return False
    return True

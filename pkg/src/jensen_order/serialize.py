"""JSON/CSV reading and writing.

Matrix files look like ``{"dim": n, "entries": [[re, im], ...]}`` with
``n * n`` row-major entries and must be exactly Hermitian. Reports write
every float with 17 significant digits so that identical runs produce
identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .hermitian import as_hermitian

__all__ = [
    "MatrixFormatError",
    "matrix_from_doc",
    "matrix_to_doc",
    "load_matrix",
    "save_matrix",
    "dumps",
    "to_csv",
]


class MatrixFormatError(ValueError):
    """Malformed or non-Hermitian matrix document."""


def matrix_from_doc(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise MatrixFormatError('matrix JSON needs "dim" and "entries" keys')
    n = doc["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFormatError(f'"dim" must be a positive integer, got {n!r}')
    entries = doc["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        raise MatrixFormatError(f"expected {n * n} entries for dim {n}")
    vals = []
    for e in entries:
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)):
            raise MatrixFormatError(f"entry must be [re, im], got {e!r}")
        vals.append(complex(e[0], e[1]))
    M = np.array(vals, dtype=complex).reshape(n, n)
    try:
        return as_hermitian(M, exact=True)
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from None


def matrix_to_doc(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0],
            "entries": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def load_matrix(path) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from None
    try:
        return matrix_from_doc(doc)
    except MatrixFormatError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from None


def save_matrix(path, M) -> None:
    Path(path).write_text(dumps(matrix_to_doc(M)) + "\n")


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _encode(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        # short numeric rows stay on one line
        if all(isinstance(x, (int, float, np.number, bool)) for x in items) and len(items) <= 8:
            parts = []
            for x in items:
                tmp = []
                _encode(x, indent, level + 1, tmp)
                parts.append("".join(tmp))
            out.append("[" + ", ".join(parts) + "]")
            return
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(pad)
            _encode(v, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    """JSON text with 17-significant-digit floats; key order is preserved."""
    out: list[str] = []
    _encode(obj, indent, 0, out)
    return "".join(out)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt_float(float(x)).strip('"') if isinstance(x, (float, np.floating))
                    and not isinstance(x, bool) else
                    ("true" if x is True else "false" if x is False else x) for x in row])
    return buf.getvalue()

"""Text formats: matrix files, point sets and JSON reports.

Matrix file (JSON)::

    {"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}

``im`` may be omitted for real matrices. Point set (JSON), either::

    {"bloch": [[0, 0, 1], [0.5, 0, 0]]}
    {"matrices": [<matrix record>, ...]}

Reports are JSON with floats rounded to 15 significant digits; matrix
records written for replay keep full double precision.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import matcore
from .exceptions import FormatError, ValidationError


def matrix_record(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def _square_array(doc, key, dim, required=True):
    if key not in doc:
        if required:
            raise FormatError(key, "missing field")
        return np.zeros((dim, dim))
    try:
        arr = np.array(doc[key], dtype=float)
    except (TypeError, ValueError):
        raise FormatError(key, "must be a dim x dim array of real numbers") from None
    if arr.shape != (dim, dim):
        raise FormatError(key, f"expected shape ({dim}, {dim}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FormatError(key, "entries must be finite")
    return arr


def matrix_from_record(doc) -> np.ndarray:
    """Parse a matrix record and validate Hermiticity."""
    if not isinstance(doc, dict):
        raise FormatError("matrix", "expected an object with dim, re, im")
    if "dim" not in doc:
        raise FormatError("dim", "missing field")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise FormatError("dim", f"must be a positive integer, got {dim!r}")
    re = _square_array(doc, "re", dim)
    im = _square_array(doc, "im", dim, required=False)
    try:
        return matcore.hermitian(re + 1j * im)
    except ValidationError as exc:
        raise FormatError("re/im", str(exc)) from None


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(str(path), f"invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_matrix(path) -> np.ndarray:
    return matrix_from_record(_read_json(path))


def save_matrix(path, m) -> None:
    Path(path).write_text(json.dumps(matrix_record(m)) + "\n")


def load_point_set(path):
    """Return Bloch vectors ``(m, 3)`` or a matrix stack ``(m, n, n)``."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise FormatError("points", "expected an object with 'bloch' or 'matrices'")
    if "bloch" in doc:
        try:
            pts = np.array(doc["bloch"], dtype=float)
        except (TypeError, ValueError):
            raise FormatError("bloch", "must be a list of real triples") from None
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise FormatError("bloch", f"need at least two triples, got shape {pts.shape}")
        return pts
    if "matrices" in doc:
        mats = doc["matrices"]
        if not isinstance(mats, list) or len(mats) < 2:
            raise FormatError("matrices", "need a list of at least two matrix records")
        out = []
        for i, rec in enumerate(mats):
            try:
                out.append(matrix_from_record(rec))
            except FormatError as exc:
                raise FormatError(f"matrices[{i}].{exc.field}", str(exc).split(": ", 1)[-1]) from None
        if len({m.shape for m in out}) != 1:
            raise FormatError("matrices", "all matrices must have the same dimension")
        return np.stack(out)
    raise FormatError("points", "expected a 'bloch' or 'matrices' field")


def save_point_set(path, points) -> None:
    pts = np.asarray(points)
    if pts.ndim == 2:
        doc = {"bloch": pts.tolist()}
    else:
        doc = {"matrices": [matrix_record(p) for p in pts]}
    Path(path).write_text(json.dumps(doc) + "\n")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.15g}"


def _round(obj, exact):
    if isinstance(obj, dict):
        return {k: _round(v, exact or k == "points") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, exact) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist(), exact)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return format_float(x)
        return x if exact else float(format_float(x))
    return obj


def dumps_report(obj) -> str:
    """Serialize a report as stable JSON (sorted keys, 15 significant digits).

    Values under a ``points`` key are left at full precision so candidate
    records replay bit for bit.
    """
    return json.dumps(_round(obj, False), sort_keys=True)

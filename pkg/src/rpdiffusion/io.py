"""Point-cloud files (CSV / JSON) and deterministic JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .manifold import EmpiricalDistribution

RADIUS_RTOL = 1e-8


def _parse_csv(text: str, source: str):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError(f"{source}: empty file")
    header = [h.strip() for h in rows[0]]
    try:
        [float(h) for h in header if h]
        numeric_header = bool(header) and all(header)
    except ValueError:
        numeric_header = False
    if numeric_header:
        raise ValidationError(f"{source}: line 1: header row required")
    wcol = header.index("weight") if "weight" in header else None
    coords, weights = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ValidationError(
                f"{source}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise ValidationError(f"{source}: line {lineno}: non-numeric field") from None
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"{source}: line {lineno}: non-finite value")
        if wcol is not None:
            weights.append(vals.pop(wcol))
        coords.append(vals)
    if not coords:
        raise ValidationError(f"{source}: no data rows")
    return np.array(coords), (np.array(weights) if wcol is not None else None), None


def _parse_json(text: str, source: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "points" not in obj:
        raise ValidationError(f"{source}: expected an object with a 'points' field")
    try:
        X = np.array(obj["points"], dtype=float)
        w = None if obj.get("weights") is None else np.array(obj["weights"], dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{source}: points and weights must be numeric arrays") from None
    if X.ndim != 2:
        raise ValidationError(f"{source}: points must be a list of equal-length vectors")
    if "m" in obj and X.shape[1] != int(obj["m"]) + 1:
        raise ValidationError(f"{source}: m={obj['m']} but points have {X.shape[1]} coordinates")
    return X, w, obj.get("r")


def load_points(path, r: float | None = None) -> EmpiricalDistribution:
    """Read a weighted point cloud on RP^m(r).

    CSV needs a header row; a column named ``weight`` holds weights, every
    other column is a coordinate. JSON carries ``m``, ``r``, ``points`` and
    ``weights``. Weights are renormalized and points canonicalized. If ``r`` is
    given, points are projected to that radius; otherwise the radius comes from
    the file (JSON) or from the row norms, which must then agree.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    parse = _parse_json if path.suffix.lower() == ".json" else _parse_csv
    X, w, r_file = parse(text, str(path))
    norms = np.linalg.norm(X, axis=1)
    first_line = 2 if parse is _parse_csv else 1
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValidationError(f"{path}: line {first_line + zero[0]}: zero vector")
    if r is None:
        r = float(r_file) if r_file is not None else float(norms[0])
        bad = np.flatnonzero(np.abs(norms - r) > RADIUS_RTOL * r)
        if bad.size and r_file is None:
            raise ValidationError(
                f"{path}: line {first_line + bad[0]}: norm {norms[bad[0]]:.17g} differs from "
                f"radius {r:.17g}; pass --r to project onto a sphere")
    if w is not None:
        if np.any(~(w > 0)):
            bad = int(np.flatnonzero(~(w > 0))[0])
            raise ValidationError(f"{path}: line {first_line + bad}: weights must be positive")
        w = w / w.sum()
    return EmpiricalDistribution.from_points(X, w, r)


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def points_csv(X: np.ndarray, weights=None, prefix: str = "x") -> str:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    header = [f"{prefix}{i + 1}" for i in range(X.shape[1])]
    rows = [list(map(float, x)) for x in X]
    if weights is not None:
        header.append("weight")
        rows = [row + [float(wi)] for row, wi in zip(rows, weights)]
    return format_csv(header, rows)


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with insertion-ordered keys and 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"

"""JSON encodings shared by the command line tools.

quaternion   [w, x, y, z]
matrix       {"rows": r, "cols": c, "data": [[w, x, y, z], ...]}   (row-major)
series       {"trunc": N, "coeffs": [[w, x, y, z], ...]}
mseries      {"trunc": N, "coeffs": [matrix, ...]}
realization  {"A": matrix, "B": matrix, "C": matrix, "D": matrix}

Loaders also accept a full command report and look for the payload under
``result`` (and then ``series`` / ``realization``), so the output of one
command can be fed straight into another.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, List, Union

import numpy as np

from .qlinalg import QMatrix
from .quaternion import Quaternion
from .realization import Realization
from .series import MatrixQSeries, QSeries


class ParseError(ValueError):
    """Malformed input; names the file and the offending field."""

    def __init__(self, path: str, field: str, message: str):
        super().__init__(f"{path}: {field}: {message}")
        self.path = path
        self.field = field
        self.message = message

    def to_json(self) -> dict:
        return {"type": "parse", "path": self.path, "field": self.field, "message": self.message}


def _float(v) -> float:
    # -0.0 and 0.0 print differently; normalise so goldens do not flip
    f = float(v)
    return 0.0 if f == 0.0 else f


def quat_to_json(q) -> List[float]:
    return [_float(v) for v in Quaternion.coerce(q)]


def matrix_to_json(M: QMatrix) -> dict:
    return {
        "rows": M.rows,
        "cols": M.cols,
        "data": [[_float(v) for v in e] for e in M.data.reshape(-1, 4)],
    }


def series_to_json(f: QSeries) -> dict:
    return {"trunc": f.trunc, "coeffs": [quat_to_json(c) for c in f.coeffs]}


def mseries_to_json(F: MatrixQSeries) -> dict:
    return {"trunc": F.trunc, "coeffs": [matrix_to_json(c) for c in F.coefficients()]}


def realization_to_json(R: Realization) -> dict:
    return {k: matrix_to_json(getattr(R, k)) for k in "ABCD"}


def quat_from_json(obj, path: str = "<arg>", field: str = "$") -> Quaternion:
    if isinstance(obj, bool):
        raise ParseError(path, field, "expected a quaternion [w, x, y, z] or a number")
    if isinstance(obj, (int, float)):
        return Quaternion(float(obj))
    if not isinstance(obj, list) or len(obj) != 4:
        raise ParseError(path, field, "expected a quaternion [w, x, y, z]")
    vals = []
    for i, v in enumerate(obj):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ParseError(path, f"{field}[{i}]", f"expected a finite number, got {v!r}")
        vals.append(float(v))
    return Quaternion(*vals)


def _require(obj, key: str, path: str, field: str):
    if not isinstance(obj, dict):
        raise ParseError(path, field, "expected an object")
    if key not in obj:
        raise ParseError(path, f"{field}.{key}", "missing field")
    return obj[key]


def _count(obj, key: str, path: str, field: str) -> int:
    v = _require(obj, key, path, field)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ParseError(path, f"{field}.{key}", f"expected a non-negative integer, got {v!r}")
    return v


def matrix_from_json(obj, path: str = "<arg>", field: str = "$") -> QMatrix:
    if isinstance(obj, (list, int, float)) and not isinstance(obj, bool):
        return QMatrix.scalar(quat_from_json(obj, path, field))
    rows = _count(obj, "rows", path, field)
    cols = _count(obj, "cols", path, field)
    data = _require(obj, "data", path, field)
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(path, f"{field}.data", f"expected {rows * cols} entries")
    arr = np.array([quat_from_json(e, path, f"{field}.data[{i}]").array for i, e in enumerate(data)])
    return QMatrix(arr.reshape(rows, cols, 4))


def _unwrap(obj, keys):
    if isinstance(obj, dict) and "result" in obj and "command" in obj:
        obj = obj["result"]
    for k in keys:
        if isinstance(obj, dict) and k in obj and isinstance(obj[k], dict):
            return obj[k]
    return obj


def _is_matrix_obj(v) -> bool:
    return isinstance(v, dict) and "rows" in v


def series_from_json(obj, path: str = "<arg>", field: str = "$") -> Union[QSeries, MatrixQSeries]:
    """Scalar or matrix series; a bare list of coefficients is also accepted."""
    obj = _unwrap(obj, ("series",))
    if isinstance(obj, list):
        coeffs, trunc = obj, None
    else:
        coeffs = _require(obj, "coeffs", path, field)
        trunc = _count(obj, "trunc", path, field) if isinstance(obj, dict) and "trunc" in obj else None
        field = f"{field}.coeffs"
    if not isinstance(coeffs, list) or not coeffs:
        raise ParseError(path, field, "expected a non-empty list of coefficients")
    if trunc is not None and trunc != len(coeffs) - 1:
        raise ParseError(path, field, f"trunc {trunc} does not match {len(coeffs)} coefficients")
    if _is_matrix_obj(coeffs[0]):
        mats = [matrix_from_json(c, path, f"{field}[{i}]") for i, c in enumerate(coeffs)]
        if len({m.shape for m in mats}) != 1:
            raise ParseError(path, field, "matrix coefficients have different shapes")
        return MatrixQSeries(mats)
    return QSeries([quat_from_json(c, path, f"{field}[{i}]") for i, c in enumerate(coeffs)])


def realization_from_json(obj, path: str = "<arg>", field: str = "$") -> Realization:
    obj = _unwrap(obj, ("realization",))
    mats = {k: matrix_from_json(_require(obj, k, path, field), path, f"{field}.{k}") for k in "ABCD"}
    try:
        return Realization(**mats)
    except ValueError as exc:
        raise ParseError(path, field, str(exc)) from exc


def signal_from_json(obj, path: str = "<arg>", field: str = "$") -> List[Union[Quaternion, QMatrix]]:
    """Input signal: list of quaternions or list of matrices."""
    if isinstance(obj, dict) and "inputs" in obj:
        obj, field = obj["inputs"], f"{field}.inputs"
    if not isinstance(obj, list):
        raise ParseError(path, field, "expected a list of inputs")
    out = []
    for i, v in enumerate(obj):
        if _is_matrix_obj(v):
            out.append(matrix_from_json(v, path, f"{field}[{i}]"))
        else:
            out.append(quat_from_json(v, path, f"{field}[{i}]"))
    return out


def points_from_json(obj, path: str = "<arg>", field: str = "$") -> List[Quaternion]:
    if isinstance(obj, dict) and "points" in obj:
        obj, field = obj["points"], f"{field}.points"
    if not isinstance(obj, list):
        raise ParseError(path, field, "expected a list of quaternions")
    return [quat_from_json(v, path, f"{field}[{i}]") for i, v in enumerate(obj)]


def load_json(path: Union[str, Path]) -> Any:
    p = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(p, "$", f"cannot read file: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(p, f"line {exc.lineno} column {exc.colno}", exc.msg) from exc


def parse_inline(text: str, name: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"--{name}", f"column {exc.colno}", exc.msg) from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"

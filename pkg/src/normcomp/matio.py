"""JSON interchange for matrices, block matrices and reports.

Matrices serialize as ``{"dim": n, "re": [[...]], "im": [[...]]}``; block
matrices as ``{"partition": [...], "matrix": {...}}``.  Reals are written with
17 significant digits by ``dumps``, which round-trips exactly and makes output
byte-stable.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import MatrixFormatError
from .norms import BlockMatrix, Partition


def format_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".e"):
        text += ".0"
    return text


def _encode(obj: Any, indent: int | None, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_real(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    if isinstance(obj, dict):
        items = [(_encode(str(k), None, 0), _encode(v, indent, level + 1)) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
        pad = " " * (indent * (level + 1))
        inner = (",\n").join(f"{pad}{k}: {v}" for k, v in items)
        return "{\n" + inner + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple)):
        parts = [_encode(v, indent, level + 1) for v in obj]
        if not parts:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj)
        if indent is None or flat:
            return "[" + ", ".join(parts) + "]"
        pad = " " * (indent * (level + 1))
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + " " * (indent * level) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Serialize to JSON with 17-significant-digit reals."""
    return _encode(obj, indent, 0)


def matrix_to_dict(M) -> dict:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixFormatError(f"only square matrices are serialized, got shape {arr.shape}")
    return {"dim": arr.shape[0], "re": arr.real.tolist(), "im": arr.imag.tolist()}


def _rows(value, field: str, dim: int) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise MatrixFormatError(f"field {field!r} must be a list of {dim} rows")
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixFormatError(f"field {field!r} row {i} must have {dim} entries")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise MatrixFormatError(f"field {field!r} entry [{i}][{j}] is not a finite number")
    return np.array(value, dtype=np.float64).reshape(dim, dim)


def matrix_from_dict(data: Any) -> np.ndarray:
    if not isinstance(data, dict):
        raise MatrixFormatError("matrix must be a JSON object")
    dim = data.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MatrixFormatError("field 'dim' must be a positive integer")
    if "re" not in data:
        raise MatrixFormatError("missing field 're'")
    re = _rows(data["re"], "re", dim)
    im = _rows(data["im"], "im", dim) if "im" in data else np.zeros((dim, dim))
    return re + 1j * im


def block_to_dict(A: BlockMatrix) -> dict:
    return {"partition": list(A.partition.sizes), "matrix": matrix_to_dict(A.matrix)}


def block_from_dict(data: Any, *, require_psd: bool = True) -> BlockMatrix:
    if not isinstance(data, dict) or "partition" not in data or "matrix" not in data:
        raise MatrixFormatError("block matrix needs fields 'partition' and 'matrix'")
    sizes = data["partition"]
    if not isinstance(sizes, list) or not all(isinstance(s, int) and not isinstance(s, bool) for s in sizes):
        raise MatrixFormatError("field 'partition' must be a list of integers")
    return BlockMatrix(matrix_from_dict(data["matrix"]), Partition(tuple(sizes)), require_psd=require_psd)


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix file; a block matrix file yields its matrix."""
    data = read_json(path)
    if isinstance(data, dict) and "partition" in data:
        return matrix_from_dict(data.get("matrix"))
    return matrix_from_dict(data)


def load_block_matrix(path: str | Path, partition=None, *, require_psd: bool = True) -> BlockMatrix:
    """Read a block matrix file, or a plain matrix file plus an overlaid partition.

    An explicit ``partition`` overrides the one stored in the file.
    """
    data = read_json(path)
    if isinstance(data, dict) and "partition" in data:
        A = block_from_dict(data, require_psd=require_psd)
        if partition is None:
            return A
        return BlockMatrix(A.matrix, partition, require_psd=require_psd)
    if partition is None:
        raise MatrixFormatError(f"{path} stores a plain matrix; a partition is required")
    return BlockMatrix(matrix_from_dict(data), partition, require_psd=require_psd)


def save_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj) + "\n")

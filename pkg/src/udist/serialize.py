"""JSON formats shared by the library and the CLI.

Matrix format: ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` with the
entries row-major. Readers reject length mismatches and non-finite values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .linalg import as_complex_matrix


def matrix_to_json(m) -> dict:
    """Encode a matrix as a JSON-ready dict."""
    m = as_complex_matrix(m)
    rows, cols = m.shape
    data = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return {"rows": rows, "cols": cols, "data": data}


def matrix_from_json(obj) -> np.ndarray:
    """Decode the repo matrix format, validating shape and finiteness."""
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ValueError(
            f"matrix data length {len(data) if isinstance(data, list) else '?'} "
            f"does not match {rows}x{cols}"
        )
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ValueError(f"matrix entry {i} is not a [re, im] pair")
        re, im = float(entry[0]), float(entry[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValueError(f"matrix entry {i} is not finite")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)


def save_matrix(path, m) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(m)) + "\n")


def load_matrix(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read matrix from {path}: {exc}") from exc
    return matrix_from_json(obj)


def state_to_json(v) -> list:
    """Encode a state vector as a list of [re, im] pairs."""
    s = np.asarray(v, dtype=np.complex128).ravel()
    return [[float(z.real), float(z.imag)] for z in s]


def dumps_deterministic(payload) -> str:
    """Serialize to JSON with a stable byte representation."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"

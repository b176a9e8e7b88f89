"""Matrix Market and manifest file helpers used by the command-line front end.

Matrices and vectors are stored in Matrix Market array format (real, general),
vectors as single-column matrices.  Manifests are plain ``key = value`` text
files; float values are written with repr so they read back bit-exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy import io as spio


def write_matrix(path, a: np.ndarray) -> None:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    spio.mmwrite(str(path), a)


def read_matrix(path) -> np.ndarray:
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such file: {path}")
    a = np.asarray(spio.mmread(str(path)), dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{path} does not hold a 2-d array")
    return a


def write_vector(path, v: np.ndarray) -> None:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d array, got shape {v.shape}")
    spio.mmwrite(str(path), v.reshape(-1, 1))


def read_vector(path) -> np.ndarray:
    a = read_matrix(path)
    if a.shape[1] != 1:
        raise ValueError(f"{path} holds a {a.shape} matrix, not a column vector")
    return a[:, 0].copy()


def write_manifest(path, entries: dict) -> None:
    lines = []
    for key, value in entries.items():
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed manifest line: {raw!r}")
        entries[key.strip()] = value.strip()
    return entries

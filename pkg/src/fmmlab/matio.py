"""Float matrix files: a `rows cols` header line, then the entries
row-major as decimal floats (whitespace separated, one row per line)."""

from __future__ import annotations

import numpy as np

__all__ = ["read_mat", "write_mat", "loads_mat", "dumps_mat"]


def loads_mat(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("expected 'rows cols' header")
    rows, cols = int(header[0]), int(header[1])
    values = [float(tok) for ln in lines[1:] for tok in ln.split()]
    if len(values) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(values)}")
    return np.array(values).reshape(rows, cols)


def dumps_mat(A: np.ndarray) -> str:
    A = np.asarray(A, dtype=np.float64)
    out = [f"{A.shape[0]} {A.shape[1]}"]
    for row in A:
        out.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(out) + "\n"


def read_mat(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_mat(fh.read())


def write_mat(A: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_mat(A))

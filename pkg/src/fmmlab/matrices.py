"""Dense exact matrices over Q(sqrt(3)) and helpers shared by the formula
machinery.

``MatrixQ`` is deliberately small: the matrices in this package are at most
8x16, so clarity beats asymptotics.  Float matrices are plain numpy arrays.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .coeff import Coefficient, format_coeff, parse_coeff

__all__ = ["MatrixQ", "parse_matrix", "format_matrix"]


def _as_coeff(value) -> Coefficient:
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, (int, Fraction)):
        return Coefficient(value)
    if isinstance(value, str):
        return parse_coeff(value)
    raise TypeError(f"cannot build Coefficient from {type(value).__name__}")


class MatrixQ:
    """Row-major dense matrix with Coefficient entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence]):
        self.data = [[_as_coeff(v) for v in row] for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        if any(len(row) != self.cols for row in self.data):
            raise ValueError("ragged rows")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int) -> "MatrixQ":
        return MatrixQ([[0] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int) -> "MatrixQ":
        return MatrixQ([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_rows(rows: Iterable[Sequence]) -> "MatrixQ":
        return MatrixQ([list(r) for r in rows])

    def copy(self) -> "MatrixQ":
        return MatrixQ(self.data)

    # -- access ----------------------------------------------------------

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def row(self, i: int) -> list[Coefficient]:
        return list(self.data[i])

    def col(self, j: int) -> list[Coefficient]:
        return [self.data[i][j] for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixQ):
            return NotImplemented
        return self.shape == other.shape and all(
            self.data[i][j] == other.data[i][j]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def __hash__(self):
        return hash(tuple(tuple(row) for row in self.data))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "MatrixQ") -> "MatrixQ":
        self._check_same_shape(other)
        return MatrixQ(
            [
                [self.data[i][j] + other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "MatrixQ") -> "MatrixQ":
        self._check_same_shape(other)
        return MatrixQ(
            [
                [self.data[i][j] - other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self) -> "MatrixQ":
        return self.scale(Coefficient(-1))

    def scale(self, c) -> "MatrixQ":
        c = _as_coeff(c)
        return MatrixQ([[c * v for v in row] for row in self.data])

    def __matmul__(self, other: "MatrixQ") -> "MatrixQ":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = MatrixQ.zeros(self.rows, other.cols)
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.data[i][k]
                if a.is_zero():
                    continue
                for j in range(other.cols):
                    b = other.data[k][j]
                    if not b.is_zero():
                        out.data[i][j] = out.data[i][j] + a * b
        return out

    def matvec(self, v: Sequence[Coefficient]) -> list[Coefficient]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            acc = Coefficient(0)
            for j in range(self.cols):
                a = self.data[i][j]
                if not a.is_zero():
                    acc = acc + a * v[j]
            out.append(acc)
        return out

    def transpose(self) -> "MatrixQ":
        return MatrixQ([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def kron(self, other: "MatrixQ") -> "MatrixQ":
        out = MatrixQ.zeros(self.rows * other.rows, self.cols * other.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i][j]
                if a.is_zero():
                    continue
                for p in range(other.rows):
                    for q in range(other.cols):
                        out.data[i * other.rows + p][j * other.cols + q] = a * other.data[p][q]
        return out

    # -- structure -----------------------------------------------------

    def nnz(self) -> int:
        return sum(1 for row in self.data for v in row if not v.is_zero())

    def row_nnz(self, i: int) -> int:
        return sum(1 for v in self.data[i] if not v.is_zero())

    def col_nnz(self, j: int) -> int:
        return sum(1 for i in range(self.rows) if not self.data[i][j].is_zero())

    def max_abs_float(self) -> float:
        return max((abs(v).to_float() for row in self.data for v in row), default=0.0)

    def to_float(self) -> np.ndarray:
        return np.array([[v.to_float() for v in row] for row in self.data], dtype=np.float64)

    # -- elimination -----------------------------------------------------

    def inverse(self) -> "MatrixQ":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = [list(self.data[i]) + [Coefficient(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
            if pivot is None:
                raise ValueError("singular matrix")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv_p = 1 / aug[col][col]
            aug[col] = [v * inv_p for v in aug[col]]
            for r in range(n):
                if r != col and not aug[r][col].is_zero():
                    factor = aug[r][col]
                    aug[r] = [vr - factor * vc for vr, vc in zip(aug[r], aug[col])]
        return MatrixQ([row[n:] for row in aug])

    def det2(self) -> Coefficient:
        if self.shape != (2, 2):
            raise ValueError("det2 is for 2x2 matrices")
        return self.data[0][0] * self.data[1][1] - self.data[0][1] * self.data[1][0]

    def rank(self) -> int:
        return len(pluq(self).pivot_rows)

    def solve_rows(self, basis_rows: list[int]) -> "MatrixQ | None":
        """Express every row as a combination of ``basis_rows``.

        Returns the coefficient matrix S with ``self = S @ self[basis_rows]``,
        or None when the chosen rows do not span the row space.
        """
        basis = MatrixQ([self.data[i] for i in basis_rows])
        if basis.rank() != len(basis_rows):
            return None
        bt = basis.transpose()
        coeffs = []
        for i in range(self.rows):
            sol = _solve_exact(bt, self.row(i))
            if sol is None:
                return None
            coeffs.append(sol)
        return MatrixQ(coeffs)

    def _check_same_shape(self, other: "MatrixQ"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __repr__(self):
        return f"MatrixQ({self.rows}x{self.cols})"

    def __str__(self):
        return format_matrix(self)


def _solve_exact(A: MatrixQ, b: Sequence[Coefficient]) -> list[Coefficient] | None:
    """Solve A x = b exactly; A may be rectangular (rows >= cols).  Returns
    None when inconsistent."""
    m, n = A.shape
    aug = [list(A.data[i]) + [b[i]] for i in range(m)]
    pivots = []
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if not aug[i][col].is_zero()), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv_p = 1 / aug[r][col]
        aug[r] = [v * inv_p for v in aug[r]]
        for i in range(m):
            if i != r and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not aug[i][n].is_zero():
            return None
    x = [Coefficient(0)] * n
    for row_idx, col in enumerate(pivots):
        x[col] = aug[row_idx][n]
    # verify (guards against free variables picked as zero)
    check = A.matvec(x)
    if any((check[i] - b[i]).sign() != 0 for i in range(m)):
        return None
    return x


class PLUQ:
    """Exact M = P L U Q factorization with sparsity-greedy pivoting.

    ``pivot_rows`` lists, in elimination order, the row indices of M chosen
    as independent; ``L1`` is the unit lower-triangular r x r block for those
    rows and ``L2`` the (m-r) x r block expressing the remaining rows, so
    that rows(M)[dependent] = L2 L1^{-1} rows(M)[pivot_rows] after the same
    column operations — hence also without them.
    """

    def __init__(self, pivot_rows, dependent_rows, L1, L2):
        self.pivot_rows = pivot_rows
        self.dependent_rows = dependent_rows
        self.L1 = L1
        self.L2 = L2

    def dependency_matrix(self) -> MatrixQ:
        """Rows(M)[dependent] = dependency_matrix() @ rows(M)[pivot_rows]."""
        return self.L2 @ self.L1.inverse()


def pluq(M: MatrixQ) -> PLUQ:
    """Gaussian elimination choosing the sparsest available pivot row first
    (lexicographic tie-break), then the sparsest pivot column within it."""
    m, n = M.shape
    work = [list(row) for row in M.data]
    remaining = list(range(m))
    pivot_rows: list[int] = []
    elim_cols: list[int] = []
    # L factors indexed by elimination step
    lower: dict[int, list[Coefficient]] = {i: [] for i in range(m)}
    while remaining:
        candidates = [
            i for i in remaining if any(not work[i][j].is_zero() for j in range(n))
        ]
        if not candidates:
            break
        candidates.sort(key=lambda i: (sum(1 for v in work[i] if not v.is_zero()), i))
        pr = candidates[0]
        cols = [j for j in range(n) if not work[pr][j].is_zero()]
        cols.sort(key=lambda j: (sum(1 for i in remaining if not work[i][j].is_zero()), j))
        pc = cols[0]
        pivot_val = work[pr][pc]
        pivot_rows.append(pr)
        elim_cols.append(pc)
        remaining.remove(pr)
        for i in remaining:
            factor = work[i][pc] / pivot_val
            lower[i].append(factor)
            if not factor.is_zero():
                work[i] = [vi - factor * vp for vi, vp in zip(work[i], work[pr])]
        lower[pr] = lower[pr] + [Coefficient(1)]
    r = len(pivot_rows)
    dependent = [i for i in range(m) if i not in pivot_rows]
    def pad(vec):
        return vec + [Coefficient(0)] * (r - len(vec))
    L1 = MatrixQ([pad(lower[i]) for i in pivot_rows])
    L2 = MatrixQ([pad(lower[i]) for i in dependent]) if dependent else MatrixQ.zeros(0, r)
    return PLUQ(pivot_rows, dependent, L1, L2)


# -- text format: one row per line, whitespace-separated coefficient tokens --


def parse_matrix(text: str) -> MatrixQ:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([parse_coeff(tok) for tok in line.split()])
    if not rows:
        raise ValueError("empty matrix text")
    return MatrixQ(rows)


def format_matrix(M: MatrixQ) -> str:
    return "\n".join(" ".join(format_coeff(v) for v in row) for row in M.data)

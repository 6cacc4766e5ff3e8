"""The HM representation of a bilinear formula: three r-rowed matrices
<L, R, Pt> plus the block dimensions (m, k, n).

Storage conventions, used consistently across the package:

* row q of L is the row-major vectorization of the q-th left component
  (the linear form applied to A, an m x k matrix): column index i*k+j for
  the entry multiplying a_ij;
* row q of R likewise for B (k x n): column index j*n+l for b_jl;
* row q of Pt holds the contribution of product q to the output, indexed
  column-major: column l*m+i is the coefficient sent to c_il.

With these conventions the evaluation map is C[i,l] = out[l*m+i] where
out = Pt^T ((L vec(A)) .* (R vec(B))), and a representation equals the
matrix-multiplication tensor exactly when the Brent equations below hold.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .coeff import Coefficient, CoeffParseError, format_coeff, parse_coeff
from .matrices import MatrixQ

__all__ = [
    "HMRep",
    "ValidationReport",
    "validate_brent",
    "eval_bilinear",
    "naive_op_counts",
    "read_hm",
    "write_hm",
    "reads_hm",
    "dumps_hm",
    "compose_cob",
]

Component = Union[MatrixQ, np.ndarray]


@dataclass
class HMRep:
    """A bilinear formula <L, R, Pt> of rank r for (m x k) by (k x n)."""

    m: int
    k: int
    n: int
    r: int
    L: Component
    R: Component
    Pt: Component
    name: Optional[str] = None

    def __post_init__(self):
        shapes = {
            "L": (self.r, self.m * self.k),
            "R": (self.r, self.k * self.n),
            "Pt": (self.r, self.m * self.n),
        }
        for attr, want in shapes.items():
            got = getattr(self, attr).shape
            if tuple(got) != want:
                raise ValueError(f"{attr} has shape {got}, expected {want}")

    @property
    def is_exact(self) -> bool:
        return isinstance(self.L, MatrixQ)

    def components(self) -> tuple[Component, Component, Component]:
        return self.L, self.R, self.Pt

    def to_float(self) -> "HMRep":
        if not self.is_exact:
            return self
        return HMRep(
            self.m, self.k, self.n, self.r,
            self.L.to_float(), self.R.to_float(), self.Pt.to_float(),
            name=self.name,
        )

    def with_name(self, name: str) -> "HMRep":
        return replace(self, name=name)

    def row_norms2(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Euclidean norms of the rows of L, R, Pt.

        For exact components the squared sums are computed in Q(sqrt(3))
        and rounded once before the square root.
        """
        out = []
        for comp in self.components():
            if isinstance(comp, MatrixQ):
                sq = [sum((v * v for v in comp.row(i)), Coefficient(0)) for i in range(comp.rows)]
                out.append(np.sqrt(np.array([s.to_float() for s in sq])))
            else:
                out.append(np.sqrt(np.sum(np.asarray(comp) ** 2, axis=1)))
        return tuple(out)


@dataclass
class ValidationReport:
    valid: bool
    first_failure: Optional[tuple] = None
    max_residual: float = 0.0

    def __bool__(self):
        return self.valid


def validate_brent(rep: HMRep, tol: float = 1e-12) -> ValidationReport:
    """Check that the formula equals the (m,k,n) matrix-multiplication
    tensor: for all ((i,j),(j2,l),(i2,l2)),

        sum_q L[q,(i,j)] R[q,(j2,l)] Pt[q,(i2,l2)]  =  [j=j2][i=i2][l=l2].

    Exact components are checked by equality; float components by residual
    against ``tol``.
    """
    m, k, n, r = rep.m, rep.k, rep.n, rep.r
    exact = rep.is_exact
    L, R, Pt = rep.components()
    if not exact:
        L = np.asarray(L)
        R = np.asarray(R)
        Pt = np.asarray(Pt)
    max_res = 0.0
    for i in range(m):
        for j in range(k):
            lcol = i * k + j
            for j2 in range(k):
                for l in range(n):
                    rcol = j2 * n + l
                    for i2 in range(m):
                        for l2 in range(n):
                            pcol = l2 * m + i2
                            want = 1 if (j == j2 and i == i2 and l == l2) else 0
                            if exact:
                                acc = Coefficient(0)
                                for q in range(r):
                                    a = L[q, lcol]
                                    if a.is_zero():
                                        continue
                                    b = R[q, rcol]
                                    if b.is_zero():
                                        continue
                                    acc = acc + a * b * Pt[q, pcol]
                                if acc != Coefficient(want):
                                    return ValidationReport(False, ((i, j), (j2, l), (i2, l2)))
                            else:
                                acc_f = float(np.dot(L[:, lcol] * R[:, rcol], Pt[:, pcol]))
                                res = abs(acc_f - want)
                                if res > max_res:
                                    max_res = res
                                if res > tol:
                                    return ValidationReport(
                                        False, ((i, j), (j2, l), (i2, l2)), max_res
                                    )
    return ValidationReport(True, None, max_res)


def _vec_rm(M, rows, cols, exact):
    if exact:
        return [M.data[i][j] for i in range(rows) for j in range(cols)]
    return np.asarray(M, dtype=np.float64).reshape(rows * cols)


def eval_bilinear(rep: HMRep, A, B):
    """Evaluate the bilinear map directly: exact when all inputs exact."""
    m, k, n = rep.m, rep.k, rep.n
    exact = rep.is_exact and isinstance(A, MatrixQ) and isinstance(B, MatrixQ)
    if isinstance(A, MatrixQ) != isinstance(B, MatrixQ):
        raise TypeError("A and B must both be exact or both float")
    if rep.is_exact and not isinstance(A, MatrixQ):
        rep = rep.to_float()
    elif not rep.is_exact and isinstance(A, MatrixQ):
        A = A.to_float()
        B = B.to_float()
    ashape = A.shape if isinstance(A, MatrixQ) else np.asarray(A).shape
    bshape = B.shape if isinstance(B, MatrixQ) else np.asarray(B).shape
    if tuple(ashape) != (m, k) or tuple(bshape) != (k, n):
        raise ValueError(f"dimension mismatch: A{tuple(ashape)} B{tuple(bshape)} vs ({m},{k},{n})")
    if exact:
        va = _vec_rm(A, m, k, True)
        vb = _vec_rm(B, k, n, True)
        la = rep.L.matvec(va)
        rb = rep.R.matvec(vb)
        h = [la[q] * rb[q] for q in range(rep.r)]
        out = rep.Pt.transpose().matvec(h)
        C = MatrixQ.zeros(m, n)
        for l in range(n):
            for i in range(m):
                C.data[i][l] = out[l * m + i]
        return C
    va = _vec_rm(A, m, k, False)
    vb = _vec_rm(B, k, n, False)
    h = (np.asarray(rep.L) @ va) * (np.asarray(rep.R) @ vb)
    out = np.asarray(rep.Pt).T @ h
    C = np.empty((m, n))
    for l in range(n):
        C[:, l] = out[l * m : (l + 1) * m]
    return C


def naive_op_counts(rep: HMRep) -> dict:
    """Operation counts of the row-by-row implementation of the formula:
    one multiplication per coefficient outside {0,+-1}, and per linear side
    nnz minus the number of combinations formed."""
    if not rep.is_exact:
        raise TypeError("op counts require the exact backend")
    L, R, Pt = rep.components()
    mul_div = sum(
        1
        for comp in (L, R, Pt)
        for row in comp.data
        for v in row
        if not v.is_zero() and not v.is_unit_or_zero()
    )
    add_sub = (L.nnz() - rep.r) + (R.nnz() - rep.r)
    for j in range(rep.m * rep.n):
        add_sub += max(Pt.col_nnz(j) - 1, 0)
    return {"mul_div": mul_div, "add_sub": add_sub}


# -- HM text format ----------------------------------------------------
#
# # comment lines allowed
# HM r=<int> m=<int> k=<int> n=<int>
# L
# <r lines of m*k tokens>
# R
# <r lines of k*n tokens>
# Pt
# <r lines of m*n tokens>


class HMFormatError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def reads_hm(text: str, name: Optional[str] = None) -> HMRep:
    lines = text.splitlines()
    idx = 0

    def next_line():
        nonlocal idx
        while idx < len(lines):
            raw = lines[idx]
            idx += 1
            stripped = raw.strip()
            if stripped and not stripped.startswith("#"):
                return stripped, idx
        return None, idx

    header, line_no = next_line()
    if header is None or not header.startswith("HM"):
        raise HMFormatError("expected 'HM r=.. m=.. k=.. n=..' header", line_no)
    fields = dict()
    for token in header.split()[1:]:
        if "=" not in token:
            raise HMFormatError(f"bad header token {token!r}", line_no)
        key, _, val = token.partition("=")
        try:
            fields[key] = int(val)
        except ValueError:
            raise HMFormatError(f"bad integer in {token!r}", line_no) from None
    missing = {"r", "m", "k", "n"} - set(fields)
    if missing:
        raise HMFormatError(f"header missing {sorted(missing)}", line_no)
    r, m, k, n = fields["r"], fields["m"], fields["k"], fields["n"]
    if min(r, m, k, n) < 1:
        raise HMFormatError("dimensions must be positive", line_no)

    comps = {}
    for comp_name, width in (("L", m * k), ("R", k * n), ("Pt", m * n)):
        marker, line_no = next_line()
        if marker != comp_name:
            raise HMFormatError(f"expected section marker {comp_name!r}, got {marker!r}", line_no)
        rows = []
        for _ in range(r):
            row_text, line_no = next_line()
            if row_text is None:
                raise HMFormatError(f"unexpected end of file in section {comp_name}", line_no)
            if row_text in ("L", "R", "Pt"):
                raise HMFormatError(
                    f"section {comp_name} has {len(rows)} rows, expected {r}", line_no
                )
            tokens = row_text.split()
            if len(tokens) != width:
                raise HMFormatError(
                    f"expected {width} tokens in section {comp_name}, got {len(tokens)}", line_no
                )
            try:
                rows.append([parse_coeff(tok) for tok in tokens])
            except CoeffParseError as exc:
                raise HMFormatError(str(exc), line_no) from None
        comps[comp_name] = MatrixQ(rows)
    trailing, line_no = next_line()
    if trailing is not None:
        raise HMFormatError(f"unexpected trailing content {trailing!r}", line_no)
    return HMRep(m, k, n, r, comps["L"], comps["R"], comps["Pt"], name=name)


def dumps_hm(rep: HMRep, comment: Optional[str] = None) -> str:
    if not rep.is_exact:
        raise TypeError("only exact representations can be serialized")
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"# {line}\n")
    out.write(f"HM r={rep.r} m={rep.m} k={rep.k} n={rep.n}\n")
    for comp_name, comp in zip(("L", "R", "Pt"), rep.components()):
        out.write(comp_name + "\n")
        for row in comp.data:
            out.write(" ".join(format_coeff(v) for v in row) + "\n")
    return out.getvalue()


def read_hm(path) -> HMRep:
    with open(path, "r", encoding="utf-8") as fh:
        return reads_hm(fh.read())


def write_hm(rep: HMRep, path, comment: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_hm(rep, comment=comment))


def compose_cob(cob: HMRep, core: HMRep) -> HMRep:
    """Recombine a change-of-basis triple with a sparse core.

    ``cob`` holds three 4x4 matrices (as an r=4 representation) such that
    each full component factors as core_component @ cob_component.  The
    result is the bilinear map actually computed by the pipeline
    "transform inputs, run core, transform output".
    """
    if not (cob.is_exact and core.is_exact):
        raise TypeError("composition requires exact backends")
    if cob.m != core.m or cob.k != core.k or cob.n != core.n:
        raise ValueError("dimension mismatch between cob and core")
    return HMRep(
        core.m, core.k, core.n, core.r,
        core.L @ cob.L,
        core.R @ cob.R,
        core.Pt @ cob.Pt,
        name=(core.name or "core") + "+cob",
    )

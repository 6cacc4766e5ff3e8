"""Floating-point recursive matrix multiplication driven by the catalog's
bilinear programs, the alternative-basis pipeline, and the conventional and
compensated reference products.

The recursion is evaluated level by level with the subproblems batched into
one numpy array per slot, which keeps Python overhead at O(instructions x
levels) while performing, per scalar output, exactly the same IEEE
operations in exactly the same order as the straightforward depth-first
recursion: block additions and scalings are elementwise, so batching does
not change any individual rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .catalog import catalog
from .slp import SLProgram, ZERO_SLOT, compile_bilinear, is_bilinear
from .slp_catalog import catalog_slp, slp_names

__all__ = [
    "RecursionConfig",
    "algorithm_slp",
    "rec_multiply",
    "lcob",
    "rcob",
    "cobp",
    "sparse_multiply",
    "conventional_multiply",
    "reference_multiply",
]

_SQRT3 = math.sqrt(3.0)
_INV_SQRT3 = 1.0 / math.sqrt(3.0)
_TWO_OVER_SQRT3 = 2.0 / math.sqrt(3.0)
_HALF_SQRT3 = math.sqrt(3.0) / 2.0


@dataclass
class RecursionConfig:
    algorithm: str = "strassen"
    cutoff: int = 1  # base-case dimension
    basis_mode: str = "direct"  # direct | alternative

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.basis_mode not in ("direct", "alternative"):
            raise ValueError("basis_mode must be 'direct' or 'alternative'")


def algorithm_slp(name: str) -> SLProgram:
    """The bilinear program driving the recursion for a catalog algorithm:
    the published program when one exists, otherwise the naive compilation
    of the formula."""
    if name in slp_names():
        return catalog_slp(name)
    return compile_bilinear(catalog(name), "naive")


class _CompiledBilinear:
    """Instruction plan for blockwise evaluation: input-side instructions,
    the ordered product list, output-side instructions, with float
    coefficients fixed once and per-slot liveness for early frees."""

    def __init__(self, prog: SLProgram):
        if not is_bilinear(prog):
            raise ValueError("program is not bilinear")
        self.inputs = list(prog.inputs)
        self.outputs = list(prog.outputs)
        product_dsts = []
        pre, post = [], []
        depends = set()
        for ins in prog.instrs:
            if ins.op == "mul":
                product_dsts.append(ins)
                depends.add(ins.dst)
            elif any(a in depends for a in ins.args()):
                post.append(ins)
                depends.add(ins.dst)
            else:
                pre.append(ins)
        self.pre = [self._lower(i) for i in pre]
        self.muls = [(i.dst, i.a, i.b) for i in product_dsts]
        self.post = [self._lower(i) for i in post]
        self.r = len(self.muls)
        slots = [s for i in (pre + product_dsts + post) for s in i.args()]
        self.uses_zero = ZERO_SLOT in slots or ZERO_SLOT in self.outputs

    @staticmethod
    def _lower(ins):
        coeff = ins.coeff.to_float() if ins.coeff is not None else None
        return (ins.op, ins.dst, ins.a, ins.b, coeff)


_plan_cache: dict[str, _CompiledBilinear] = {}


def _plan_for(name: str) -> _CompiledBilinear:
    if name not in _plan_cache:
        _plan_cache[name] = _CompiledBilinear(algorithm_slp(name))
    return _plan_cache[name]


def _eval_block_level(env, instrs):
    for op, dst, a, b, coeff in instrs:
        if op == "add":
            env[dst] = env[a] + env[b]
        elif op == "sub":
            env[dst] = env[a] - env[b]
        else:  # scale
            env[dst] = coeff * env[a]


def _rec_batch(plan: _CompiledBilinear, A: np.ndarray, B: np.ndarray, depth: int) -> np.ndarray:
    """A, B: (batch, s, s) operand stacks; returns (batch, s, s) products."""
    if depth == 0:
        if A.shape[1] == 1:
            return A * B
        return np.matmul(A, B)
    batch, s, _ = A.shape
    h = s // 2
    env: dict[str, np.ndarray] = {}
    quads = [(slice(0, h), slice(0, h)), (slice(0, h), slice(h, s)),
             (slice(h, s), slice(0, h)), (slice(h, s), slice(h, s))]
    for idx, slot in enumerate(plan.inputs[:4]):
        env[slot] = A[:, quads[idx][0], quads[idx][1]]
    for idx, slot in enumerate(plan.inputs[4:]):
        env[slot] = B[:, quads[idx][0], quads[idx][1]]
    if plan.uses_zero:
        env[ZERO_SLOT] = np.zeros((batch, h, h))
    _eval_block_level(env, plan.pre)
    left = np.empty((batch, plan.r, h, h))
    right = np.empty((batch, plan.r, h, h))
    for q, (_, a, b) in enumerate(plan.muls):
        left[:, q] = env[a]
        right[:, q] = env[b]
    # free input-side arrays before recursing
    env.clear()
    prods = _rec_batch(plan, left.reshape(batch * plan.r, h, h),
                       right.reshape(batch * plan.r, h, h), depth - 1)
    del left, right
    prods = prods.reshape(batch, plan.r, h, h)
    env = {}
    if plan.uses_zero:
        env[ZERO_SLOT] = np.zeros((batch, h, h))
    for q, (dst, _, _) in enumerate(plan.muls):
        env[dst] = prods[:, q]
    _eval_block_level(env, plan.post)
    C = np.empty((batch, s, s))
    for idx, slot in enumerate(plan.outputs):
        C[:, quads[idx][0], quads[idx][1]] = env[slot]
    return C


def _pad_to(A: np.ndarray, size: int) -> np.ndarray:
    n = A.shape[0]
    if n == size:
        return A
    out = np.zeros((size, size))
    out[:n, :n] = A
    return out


def _levels_for(n: int, cutoff: int) -> int:
    ell = 0
    size = cutoff
    while size < n:
        size *= 2
        ell += 1
    return ell


def rec_multiply(A: np.ndarray, B: np.ndarray, cfg: RecursionConfig) -> np.ndarray:
    """Recursive product by the configured algorithm: pad to cutoff*2^ell,
    recurse blockwise in the program's instruction order, unpad."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape or A.shape[0] == 0:
        raise ValueError("rec_multiply expects equal square nonempty matrices")
    if cfg.basis_mode == "alternative":
        return sparse_multiply(A, B, cfg)
    n = A.shape[0]
    ell = _levels_for(n, cfg.cutoff)
    size = cfg.cutoff * (1 << ell)
    plan = _plan_for(cfg.algorithm)
    Ap = _pad_to(A, size)[None, :, :]
    Bp = _pad_to(B, size)[None, :, :]
    C = _rec_batch(plan, Ap, Bp, ell)[0]
    return np.ascontiguousarray(C[:n, :n])


# -- alternative-basis transforms ------------------------------------------
#
# The operand transforms combine quadrants row-major ((m1..m4) = (X11, X12,
# X21, X22), results placed the same way); the output transform consumes
# the core result's quadrants column-major and places row-major.  These
# bindings make each one-level transform act as the matching 4x4
# change-of-basis matrix of the composed formula, so "transform inputs,
# run the sparse core, transform the output" computes the product exactly.


def _quads(A: np.ndarray, order: str) -> tuple:
    s = A.shape[1]
    h = s // 2
    if order == "rm":
        return (A[:, :h, :h], A[:, :h, h:], A[:, h:, :h], A[:, h:, h:])
    return (A[:, :h, :h], A[:, h:, :h], A[:, :h, h:], A[:, h:, h:])


def _assemble_rm(parts: tuple) -> np.ndarray:
    m1, m2, m3, m4 = parts
    batch, h, _ = m1.shape
    C = np.empty((batch, 2 * h, 2 * h))
    C[:, :h, :h] = m1
    C[:, :h, h:] = m2
    C[:, h:, :h] = m3
    C[:, h:, h:] = m4
    return C


def _cob_recurse(A: np.ndarray, levels: int, combine, order: str) -> np.ndarray:
    if levels <= 0:
        return A
    batch = A.shape[0]
    stacked = np.concatenate(_quads(A, order), axis=0)
    stacked = _cob_recurse(stacked, levels - 1, combine, order)
    m1, m2, m3, m4 = (stacked[i * batch : (i + 1) * batch] for i in range(4))
    return _assemble_rm(combine(m1, m2, m3, m4))


def _lcob_combine(m1, m2, m3, m4):
    t1 = _INV_SQRT3 * m4
    t2 = m3 - m2
    t3 = m1 + m4
    return (_TWO_OVER_SQRT3 * m4, m2 + t1, m3 - t1, 0.5 * t2 - _HALF_SQRT3 * t3)


def _rcob_combine(m1, m2, m3, m4):
    t1 = _INV_SQRT3 * m2
    t2 = m1 + m4
    t3 = m2 - m3
    return (_TWO_OVER_SQRT3 * m2, m1 - t1, t1 - m4, _HALF_SQRT3 * t3 - 0.5 * t2)


def _cobp_combine(m1, m2, m3, m4):
    t1 = 0.5 * m4
    t2 = m2 - m3
    t3 = _HALF_SQRT3 * m4
    o1 = (t3 + _INV_SQRT3 * t2) - _TWO_OVER_SQRT3 * m1
    o2 = -(m2 + t1)
    o3 = t1 - m3
    return (o1, o2, o3, t3)


def _apply_cob(A: np.ndarray, ell: int, combine, order: str) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if ell < 0:
        ell = 0
    if A.shape[0] % (1 << ell) != 0:
        raise ValueError(f"dimension {A.shape[0]} not divisible by 2^{ell}")
    return _cob_recurse(A[None, :, :], ell, combine, order)[0]


def lcob(A: np.ndarray, ell: int) -> np.ndarray:
    """Left-operand change of basis, ell recursion levels (identity at 0)."""
    return _apply_cob(A, ell, _lcob_combine, "rm")


def rcob(B: np.ndarray, ell: int) -> np.ndarray:
    """Right-operand change of basis."""
    return _apply_cob(B, ell, _rcob_combine, "rm")


def cobp(C: np.ndarray, ell: int) -> np.ndarray:
    """Product change of basis (applied to the core's output)."""
    return _apply_cob(C, ell, _cobp_combine, "cm")


def sparse_multiply(A: np.ndarray, B: np.ndarray, cfg: Optional[RecursionConfig] = None) -> np.ndarray:
    """Alternative-basis product: transform both operands, run the
    12-addition sparse core recursively, transform the output back."""
    if cfg is None:
        cfg = RecursionConfig(algorithm="schwartzopt", basis_mode="alternative")
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape or A.shape[0] == 0:
        raise ValueError("sparse_multiply expects equal square nonempty matrices")
    n = A.shape[0]
    ell = _levels_for(n, cfg.cutoff)
    size = cfg.cutoff * (1 << ell)
    Abar = lcob(_pad_to(A, size), ell)
    Bbar = rcob(_pad_to(B, size), ell)
    plan = _plan_for("schwartzopt")
    Cbar = _rec_batch(plan, Abar[None, :, :], Bbar[None, :, :], ell)[0]
    C = cobp(Cbar, ell)
    return np.ascontiguousarray(C[:n, :n])


def conventional_multiply(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Binary64 triple loop in fixed i-k-j order (vectorized over (i, j);
    each output element accumulates over k in ascending order, one product
    rounding and one addition rounding per step)."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[0]:
        raise ValueError("dimension mismatch")
    C = np.zeros((A.shape[0], B.shape[1]))
    for kk in range(A.shape[1]):
        C += A[:, kk : kk + 1] * B[kk : kk + 1, :]
    return C


_SPLIT = 134217729.0  # 2^27 + 1


def _two_prod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = a * b
    ah = _SPLIT * a
    ahi = ah - (ah - a)
    alo = a - ahi
    bh = _SPLIT * b
    bhi = bh - (bh - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def reference_multiply(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Conventional product with error-free transformations: exact products
    and compensated accumulation keep the error near 2^-100, so this serves
    as ground truth when measuring the fast algorithms."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[0]:
        raise ValueError("dimension mismatch")
    n, k = A.shape
    m = B.shape[1]
    hi = np.zeros((n, m))
    lo = np.zeros((n, m))
    for kk in range(k):
        p, perr = _two_prod(A[:, kk : kk + 1], B[kk : kk + 1, :])
        hi, serr = _two_sum(hi, p)
        lo += serr + perr
    return hi + lo

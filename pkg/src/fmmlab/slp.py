"""Straight-line program IR and code-shrinking transformations: naive
emission, cancellation-free common-subexpression elimination, kernel
decomposition of rank-deficient operators, transposition of linear
programs, and bilinear compilation of HM formulas.

Conventions: an SLP is SSA (each destination assigned once, arguments refer
to inputs or earlier destinations).  A *linear* program has no ``mul``
instructions.  A *bilinear* program has exactly r ``mul`` instructions,
each multiplying an A-side linear slot by a B-side linear slot; its inputs
list the A slots (row-major) then the B slots, and its outputs list the
result entries row-major.  Scales by -1 are sign flips and cost nothing;
scales by +-1/2 are reported as halvings inside the scale count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .coeff import Coefficient, format_coeff
from .hm import HMRep
from .matrices import MatrixQ, pluq

__all__ = [
    "Instr",
    "SLProgram",
    "OpCount",
    "count_ops",
    "eval_slp",
    "slp_matrix",
    "slp_product",
    "from_matrix_naive",
    "cse_optimize",
    "kernel_decompose",
    "transpose_slp",
    "compile_bilinear",
    "is_bilinear",
]

ZERO_SLOT = "__zero__"

_HALF = Coefficient(Fraction(1, 2))


@dataclass(frozen=True)
class Instr:
    op: str  # add | sub | scale | mul
    dst: str
    a: str
    b: Optional[str] = None  # None for scale
    coeff: Optional[Coefficient] = None  # set for scale

    def args(self) -> tuple[str, ...]:
        return (self.a,) if self.b is None else (self.a, self.b)

    def __str__(self):
        if self.op == "scale":
            return f"{self.dst} = {format_coeff(self.coeff)} * {self.a}"
        sym = {"add": "+", "sub": "-", "mul": "*"}[self.op]
        return f"{self.dst} = {self.a} {sym} {self.b}"


@dataclass
class SLProgram:
    inputs: list[str]
    instrs: list[Instr]
    outputs: list[str]
    name: Optional[str] = None

    def validate(self) -> None:
        seen = set(self.inputs)
        if len(seen) != len(self.inputs):
            raise ValueError("duplicate input slots")
        for ins in self.instrs:
            for arg in ins.args():
                if arg not in seen and arg != ZERO_SLOT:
                    raise ValueError(f"instruction {ins} uses undefined slot {arg!r}")
            if ins.dst in seen:
                raise ValueError(f"slot {ins.dst!r} assigned twice")
            if ins.op == "scale" and ins.coeff is None:
                raise ValueError("scale without coefficient")
            if ins.op not in ("add", "sub", "scale", "mul"):
                raise ValueError(f"unknown op {ins.op!r}")
            seen.add(ins.dst)
        for out in self.outputs:
            if out not in seen and out != ZERO_SLOT:
                raise ValueError(f"output slot {out!r} undefined")

    def is_linear(self) -> bool:
        return all(ins.op != "mul" for ins in self.instrs)

    def mul_instrs(self) -> list[Instr]:
        return [ins for ins in self.instrs if ins.op == "mul"]

    def rename(self, mapping: dict[str, str]) -> "SLProgram":
        def m(s):
            return mapping.get(s, s)

        return SLProgram(
            [m(s) for s in self.inputs],
            [Instr(i.op, m(i.dst), m(i.a), None if i.b is None else m(i.b), i.coeff) for i in self.instrs],
            [m(s) for s in self.outputs],
            name=self.name,
        )

    def __str__(self):
        head = f"# inputs: {' '.join(self.inputs)}\n"
        body = "\n".join(str(i) for i in self.instrs)
        tail = f"\n# outputs: {' '.join(self.outputs)}"
        return head + body + tail


@dataclass
class OpCount:
    adds: int = 0
    scales: int = 0
    muls: int = 0
    halvings: int = 0  # subset of scales with coefficient +-1/2

    def total_linear(self) -> int:
        return self.adds + self.scales


def count_ops(prog: SLProgram) -> OpCount:
    out = OpCount()
    for ins in prog.instrs:
        if ins.op in ("add", "sub"):
            out.adds += 1
        elif ins.op == "mul":
            out.muls += 1
        else:
            c = ins.coeff
            if not c.is_unit_or_zero():
                out.scales += 1
                if c == _HALF or c == -_HALF:
                    out.halvings += 1
    return out


def eval_slp(prog: SLProgram, bindings: dict, backend: str = "exact") -> list:
    """Evaluate sequentially; the float backend follows instruction order
    exactly (that order is the numerical algorithm under test)."""
    env = dict(bindings)
    missing = [s for s in prog.inputs if s not in env]
    if missing:
        raise KeyError(f"unbound input slots {missing}")
    env[ZERO_SLOT] = Coefficient(0) if backend == "exact" else 0.0
    for ins in prog.instrs:
        if ins.op == "add":
            env[ins.dst] = env[ins.a] + env[ins.b]
        elif ins.op == "sub":
            env[ins.dst] = env[ins.a] - env[ins.b]
        elif ins.op == "mul":
            env[ins.dst] = env[ins.a] * env[ins.b]
        else:
            c = ins.coeff if backend == "exact" else ins.coeff.to_float()
            env[ins.dst] = c * env[ins.a]
    return [env[o] for o in prog.outputs]


def slp_matrix(prog: SLProgram) -> MatrixQ:
    """The matrix of a linear program, recovered by evaluating on the
    canonical basis (exactly determines the linear map)."""
    if not prog.is_linear():
        raise ValueError("program is not linear")
    n = len(prog.inputs)
    cols = []
    for j in range(n):
        bindings = {s: Coefficient(1 if i == j else 0) for i, s in enumerate(prog.inputs)}
        cols.append(eval_slp(prog, bindings))
    return MatrixQ([[cols[j][i] for j in range(n)] for i in range(len(prog.outputs))])


def _split_inputs(prog: SLProgram) -> tuple[list[str], list[str]]:
    half = len(prog.inputs) // 2
    return prog.inputs[:half], prog.inputs[half:]


def slp_product(prog: SLProgram, A, B):
    """Run a bilinear program on two matrices (exact or float), binding
    inputs row-major and reading outputs row-major."""
    a_slots, b_slots = _split_inputs(prog)
    exact = isinstance(A, MatrixQ)
    av = [v for row in (A.data if exact else A) for v in row]
    bv = [v for row in (B.data if exact else B) for v in row]
    bindings = dict(zip(a_slots, av))
    bindings.update(zip(b_slots, bv))
    out = eval_slp(prog, bindings, backend="exact" if exact else "float")
    return out


def is_bilinear(prog: SLProgram, expect_rank: Optional[int] = None) -> bool:
    """Structural check: inputs split into A and B sides, linear slots stay
    single-sided, every mul pairs an A-side slot with a B-side slot, and
    everything after the products is linear in them."""
    a_slots, b_slots = _split_inputs(prog)
    side = {s: "A" for s in a_slots}
    side.update({s: "B" for s in b_slots})
    side[ZERO_SLOT] = "0"
    muls = 0
    for ins in prog.instrs:
        if ins.op == "mul":
            sa, sb = side.get(ins.a), side.get(ins.b)
            if (sa, sb) != ("A", "B"):
                return False
            side[ins.dst] = "P"
            muls += 1
        elif ins.op == "scale":
            side[ins.dst] = side.get(ins.a)
        else:
            sa, sb = side.get(ins.a), side.get(ins.b)
            if sa == "0":
                sa = sb
            if sb == "0":
                sb = sa
            if sa != sb or sa is None:
                return False
            side[ins.dst] = sa
    if any(side.get(o) not in ("P", "0") for o in prog.outputs):
        return False
    if expect_rank is not None and muls != expect_rank:
        return False
    return True


# -- naive emission ------------------------------------------------------


class _Emitter:
    """Builds instruction lists with fresh SSA temporaries."""

    def __init__(self, prefix: str = "t"):
        self.instrs: list[Instr] = []
        self.prefix = prefix
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"{self.prefix}{self.counter}"

    def scale(self, coeff: Coefficient, src: str) -> str:
        if coeff == Coefficient(1):
            return src
        dst = self.fresh()
        self.instrs.append(Instr("scale", dst, src, coeff=coeff))
        return dst

    def add(self, a: str, b: str) -> str:
        dst = self.fresh()
        self.instrs.append(Instr("add", dst, a, b))
        return dst

    def sub(self, a: str, b: str) -> str:
        dst = self.fresh()
        self.instrs.append(Instr("sub", dst, a, b))
        return dst

    def combination(self, terms: Sequence[tuple[Coefficient, str]]) -> str:
        """sum of coeff*slot; one add per extra term, scales only for
        non-unit coefficients."""
        cur = None
        for coeff, slot in terms:
            if coeff.is_zero():
                continue
            if cur is None:
                cur = self.scale(coeff, slot)
            elif coeff == Coefficient(1):
                cur = self.add(cur, slot)
            elif coeff == Coefficient(-1):
                cur = self.sub(cur, slot)
            elif coeff.sign() < 0:
                cur = self.sub(cur, self.scale(-coeff, slot))
            else:
                cur = self.add(cur, self.scale(coeff, slot))
        return ZERO_SLOT if cur is None else cur


def _default_names(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def from_matrix_naive(
    M: MatrixQ,
    input_names: Optional[list[str]] = None,
    output_names: Optional[list[str]] = None,
    temp_prefix: str = "t",
) -> SLProgram:
    """Row-by-row evaluation of x -> M x: nnz(M) - #nonzero-rows additions
    and one scale per entry outside {0, +-1}."""
    inputs = input_names or _default_names("x", M.cols)
    out_names = output_names or _default_names("y", M.rows)
    em = _Emitter(temp_prefix)
    outputs = []
    rename: dict[str, str] = {}
    for i in range(M.rows):
        terms = [(M.data[i][j], inputs[j]) for j in range(M.cols) if not M.data[i][j].is_zero()]
        slot = em.combination(terms)
        outputs.append(slot)
    prog = SLProgram(list(inputs), em.instrs, outputs, name="naive")
    return _label_outputs(prog, out_names)


def _label_outputs(prog: SLProgram, out_names: list[str]) -> SLProgram:
    """Rename final output slots to the requested names where possible
    (pure relabeling; pass-through and repeated slots stay references)."""
    mapping: dict[str, str] = {}
    used = set(prog.inputs) | {i.dst for i in prog.instrs}
    for slot, want in zip(prog.outputs, out_names):
        if slot in prog.inputs or slot == ZERO_SLOT or slot in mapping:
            continue
        if prog.outputs.count(slot) == 1 and want not in used:
            mapping[slot] = want
    return prog.rename(mapping)


# -- cancellation-free CSE (pair hoisting) --------------------------------


def _ratio_key(c: Coefficient) -> tuple:
    return (c.a.numerator, c.a.denominator, c.b.numerator, c.b.denominator)


def _cheapest(*progs: SLProgram) -> SLProgram:
    """First program with the lexicographically smallest (adds, scales)."""
    def key(p):
        c = count_ops(p)
        return (c.adds, c.scales)

    best = progs[0]
    for p in progs[1:]:
        if key(p) < key(best):
            best = p
    return best


def cse_optimize(
    M: MatrixQ,
    input_names: Optional[list[str]] = None,
    output_names: Optional[list[str]] = None,
    temp_prefix: str = "t",
) -> SLProgram:
    """Cancellation-free common-subexpression elimination.

    Repeatedly finds the pair of columns occurring co-linearly in the most
    rows, hoists it into a temporary (which becomes a fresh virtual
    column), and rewrites the rows; then factors repeated coefficient
    magnitudes out of columns and rows before emitting the remaining
    combinations.  Ties break on the lexicographically smallest
    (row, column pair), making the output deterministic.
    """
    inputs = input_names or _default_names("x", M.cols)
    out_names = output_names or _default_names("y", M.rows)
    em = _Emitter(temp_prefix)

    # working state: rows as dicts over column slots
    slots: list[str] = list(inputs)
    rows: list[dict[int, Coefficient]] = [
        {j: M.data[i][j] for j in range(M.cols) if not M.data[i][j].is_zero()}
        for i in range(M.rows)
    ]

    while True:
        patterns: dict[tuple, list[int]] = {}
        for ri, row in enumerate(rows):
            cols = sorted(row)
            for ai in range(len(cols)):
                for bi in range(ai + 1, len(cols)):
                    j, k2 = cols[ai], cols[bi]
                    ratio = row[k2] / row[j]
                    patterns.setdefault((j, k2, _ratio_key(ratio)), []).append(ri)
        best = None
        for (j, k2, rk), where in patterns.items():
            if len(where) < 2:
                continue
            key = (-len(where), where[0], j, k2, rk)
            if best is None or key < best[0]:
                best = (key, (j, k2), where)
        if best is None:
            break
        (j, k2), where = best[1], best[2]
        ratio = rows[where[0]][k2] / rows[where[0]][j]
        temp = em.combination([(Coefficient(1), slots[j]), (ratio, slots[k2])])
        new_col = len(slots)
        slots.append(temp)
        for ri in where:
            lam = rows[ri][j]
            del rows[ri][j]
            del rows[ri][k2]
            rows[ri][new_col] = lam

    # factor repeated magnitudes out of columns
    ncols = len(slots)
    for j in range(ncols):
        groups: dict[tuple, list[int]] = {}
        for ri, row in enumerate(rows):
            c = row.get(j)
            if c is not None and not c.is_unit_or_zero():
                groups.setdefault(_ratio_key(abs(c)), []).append(ri)
        for mag_key, where in sorted(groups.items()):
            if len(where) < 2:
                continue
            mag = abs(rows[where[0]][j])
            temp = em.scale(mag, slots[j])
            new_col = len(slots)
            slots.append(temp)
            for ri in where:
                sign = Coefficient(rows[ri][j].sign())
                del rows[ri][j]
                rows[ri][new_col] = sign

    # factor repeated magnitudes out of rows
    for ri in range(len(rows)):
        row = rows[ri]
        groups: dict[tuple, list[int]] = {}
        for j, c in row.items():
            if not c.is_unit_or_zero():
                groups.setdefault(_ratio_key(abs(c)), []).append(j)
        for mag_key, cols in sorted(groups.items()):
            if len(cols) < 2:
                continue
            cols.sort()
            mag = abs(row[cols[0]])
            terms = [(Coefficient(row[j].sign()), slots[j]) for j in cols]
            temp = em.combination(terms)
            new_col = len(slots)
            slots.append(temp)
            for j in cols:
                del row[j]
            row[new_col] = mag

    outputs = []
    for row in rows:
        terms = [(row[j], slots[j]) for j in sorted(row)]
        outputs.append(em.combination(terms))
    prog = SLProgram(list(inputs), em.instrs, outputs, name="cse")
    prog = _label_outputs(prog, out_names)
    return _cheapest(prog, from_matrix_naive(M, inputs, out_names, temp_prefix))


# -- kernel decomposition -------------------------------------------------


def kernel_decompose(
    M: MatrixQ,
    input_names: Optional[list[str]] = None,
    output_names: Optional[list[str]] = None,
) -> SLProgram:
    """When rank(M) < rows(M): compute a sparsity-pivoted set of independent
    rows via cse_optimize, then express the dependent rows as exact linear
    combinations of the computed outputs.  Falls back to cse_optimize for
    full-row-rank inputs."""
    inputs = input_names or _default_names("x", M.cols)
    out_names = output_names or _default_names("y", M.rows)
    fact = pluq(M)
    r = len(fact.pivot_rows)
    if r == M.rows:
        return cse_optimize(M, inputs, out_names)
    piv_rows = fact.pivot_rows
    dep_rows = fact.dependent_rows
    base = MatrixQ([M.data[i] for i in piv_rows])
    base_prog = cse_optimize(
        base, inputs, [f"u{i}" for i in range(r)], temp_prefix="t"
    )
    dep = fact.dependency_matrix()
    dep_prog = cse_optimize(
        dep,
        [base_prog.outputs[i] for i in range(r)],
        [f"v{i}" for i in range(len(dep_rows))],
        temp_prefix="w",
    )
    instrs = list(base_prog.instrs) + list(dep_prog.instrs)
    outputs: list[str] = [""] * M.rows
    for pos, i in enumerate(piv_rows):
        outputs[i] = base_prog.outputs[pos]
    for pos, i in enumerate(dep_rows):
        outputs[i] = dep_prog.outputs[pos]
    prog = SLProgram(list(inputs), instrs, outputs, name="kernel")
    prog.validate()
    prog = _label_outputs(prog, out_names)
    return _cheapest(prog, cse_optimize(M, inputs, out_names))


# -- transposition ---------------------------------------------------------


def transpose_slp(prog: SLProgram, temp_prefix: str = "z") -> SLProgram:
    """Transpose a linear program: the result computes M^T applied to the
    adjoint inputs, with the standard cost relation (multiplications
    preserved; additions shift by #outputs - #inputs for programs without
    dead code)."""
    if not prog.is_linear():
        raise ValueError("cannot transpose a program containing products")
    prog.validate()
    em = _Emitter(temp_prefix)
    seeds = [f"w{i}" for i in range(len(prog.outputs))]
    adj: dict[str, Optional[str]] = {}

    def accumulate(slot: str, term: str, negate: bool = False):
        if slot == ZERO_SLOT:
            return
        cur = adj.get(slot)
        if cur is None:
            adj[slot] = em.scale(Coefficient(-1), term) if negate else term
        else:
            adj[slot] = em.sub(cur, term) if negate else em.add(cur, term)

    for seed, out_slot in zip(seeds, prog.outputs):
        accumulate(out_slot, seed)
    for ins in reversed(prog.instrs):
        a_d = adj.pop(ins.dst, None)
        if a_d is None:
            continue  # dead instruction
        if ins.op == "add":
            accumulate(ins.a, a_d)
            accumulate(ins.b, a_d)
        elif ins.op == "sub":
            accumulate(ins.a, a_d)
            accumulate(ins.b, a_d, negate=True)
        elif ins.op == "scale":
            accumulate(ins.a, em.scale(ins.coeff, a_d))
        else:  # pragma: no cover - guarded above
            raise AssertionError
    outputs = [adj.get(s) or ZERO_SLOT for s in prog.inputs]
    out = SLProgram(seeds, em.instrs, outputs, name=(prog.name or "slp") + "^T")
    out.validate()
    return _label_outputs(out, _default_names("y", len(outputs)))


# -- bilinear compilation ---------------------------------------------------


def _rm_names(prefix: str, rows: int, cols: int) -> list[str]:
    return [f"{prefix}{i + 1}{j + 1}" for i in range(rows) for j in range(cols)]


def compile_bilinear(rep: HMRep, strategy: str = "naive") -> SLProgram:
    """Emit a bilinear program for an HM formula.

    The two input sides are compiled with the chosen strategy ("naive",
    "cse", or "kernel" which also routes the output side through
    kernel-decomposition of Pt followed by transposition), feeding r
    products; the output side realizes Pt^T.
    """
    if not rep.is_exact:
        raise TypeError("compile_bilinear requires an exact representation")
    m, k, n, r = rep.m, rep.k, rep.n, rep.r
    a_names = _rm_names("a", m, k)
    b_names = _rm_names("b", k, n)
    l_outs = [f"l{q + 1}" for q in range(r)]
    r_outs = [f"r{q + 1}" for q in range(r)]
    p_slots = [f"p{q + 1}" for q in range(r)]

    if strategy == "naive":
        side = from_matrix_naive
    elif strategy == "cse":
        side = cse_optimize
    elif strategy == "kernel":
        side = kernel_decompose
    else:
        raise ValueError("strategy must be 'naive', 'cse' or 'kernel'")

    lprog = side(rep.L, a_names, l_outs)
    lprog = lprog.rename({t: f"L_{t}" for t in _temps(lprog)})
    rprog = side(rep.R, b_names, r_outs)
    rprog = rprog.rename({t: f"R_{t}" for t in _temps(rprog)})

    instrs = list(lprog.instrs) + list(rprog.instrs)
    for q in range(r):
        instrs.append(Instr("mul", p_slots[q], lprog.outputs[q], rprog.outputs[q]))

    # output side: the map h -> Pt^T h, output coordinates column-major
    if strategy == "kernel":
        pt_prog = kernel_decompose(rep.Pt, p_slots, [f"h{q}" for q in range(r)])
        out_prog = transpose_slp(pt_prog)
        out_prog = out_prog.rename(dict(zip(out_prog.inputs, p_slots)))
    else:
        ptt = rep.Pt.transpose()
        out_prog = (from_matrix_naive if strategy == "naive" else cse_optimize)(
            ptt, p_slots, [f"o{j}" for j in range(m * n)]
        )
    out_prog = out_prog.rename({t: f"P_{t}" for t in _temps(out_prog)})
    instrs += list(out_prog.instrs)

    # column-major coordinate l*m+i -> row-major position i*n+l
    outputs_rm = [""] * (m * n)
    for l in range(n):
        for i in range(m):
            outputs_rm[i * n + l] = out_prog.outputs[l * m + i]
    prog = SLProgram(a_names + b_names, instrs, outputs_rm, name=f"{rep.name or 'hm'}:{strategy}")
    prog.validate()
    prog = _label_outputs(prog, _rm_names("c", m, n))
    return prog


def _temps(prog: SLProgram) -> set[str]:
    named = set(prog.inputs) | set(prog.outputs)
    return {i.dst for i in prog.instrs if i.dst not in named}

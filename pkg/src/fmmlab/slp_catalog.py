"""Hand-written straight-line programs for the catalog formulas, with
their published operation counts (asopt: 24 additions and 12 scalings;
powers: 27 additions and 6 halvings; powrot: 24 additions and 19 scalings;
schwartzopt: 12 additions).

The asopt program circulates written for the transposed product; it is
transcribed verbatim and its input matrices relabeled by their transposes
so the realized map is C = A*B with an unchanged operation sequence.  The
12-addition core program is written directly from the sparse core's
component matrices (one addition per extra nonzero on each input side,
six on the output side).  All four are pinned by exact equivalence tests
against the HM catalog.
"""

from __future__ import annotations

from .coeff import parse_coeff
from .slp import Instr, SLProgram

__all__ = ["catalog_slp", "slp_names"]


def _add(d, a, b):
    return Instr("add", d, a, b)


def _sub(d, a, b):
    return Instr("sub", d, a, b)


def _sc(d, coeff, a):
    return Instr("scale", d, a, coeff=parse_coeff(coeff))


def _mul(d, a, b):
    return Instr("mul", d, a, b)


_A_SLOTS = ["a11", "a12", "a21", "a22"]
_B_SLOTS = ["b11", "b12", "b21", "b22"]
_C_SLOTS = ["c11", "c12", "c21", "c22"]


def _program(name, instrs):
    prog = SLProgram(_A_SLOTS + _B_SLOTS, instrs, _C_SLOTS, name=name)
    prog.validate()
    return prog


def _transpose_inputs(prog: SLProgram) -> SLProgram:
    """Relabel both input matrices by their transposes.  A program written
    as (X, Y) -> (Y X)^T then realizes (A, B) -> A B with the same scalar
    operation sequence and with every product still pairing an A-side slot
    with a B-side slot."""
    ren = {"a12": "a21", "a21": "a12", "b12": "b21", "b21": "b12"}
    instrs = [
        Instr(i.op, i.dst, ren.get(i.a, i.a), i.b if i.b is None else ren.get(i.b, i.b), i.coeff)
        for i in prog.instrs
    ]
    return SLProgram(list(prog.inputs), instrs, list(prog.outputs), name=prog.name)


def _asopt() -> SLProgram:
    i = [
        _sc("t1", "1/3*s3", "a22"),
        _add("t2", "a21", "t1"),
        _sc("s1", "1/3*s3", "b21"),
        _sub("s2", "s1", "b11"),
        _add("t3", "a12", "t2"),
        _sc("l1a", "1/2*s3", "a11"),
        _sc("l1b", "1/2", "t3"),
        _add("l1", "l1a", "l1b"),
        _add("s3", "s2", "b22"),
        _sc("r1", "2", "s1"),
        _sub("l2", "a12", "t1"),
        # l3 aliases t2, r2 aliases s2
        _sub("r3", "s1", "b22"),
        _sc("l4", "2", "t1"),
        _sub("l5", "l2", "l1"),
        _sc("r4a", "1/2", "s3"),
        _sc("r4b", "1/2*s3", "b12"),
        _sub("r4", "r4a", "r4b"),
        _add("r5", "r3", "r4"),
        _add("l6", "l5", "l4"),
        _add("l7", "l5", "t2"),
        _sub("r6", "r1", "r5"),
        _sub("r7", "r5", "s2"),
        _mul("p1", "l1", "r1"),
        _mul("p2", "l2", "s2"),
        _mul("p3", "t2", "r3"),
        _mul("p4", "l4", "r4"),
        _mul("p5", "l5", "r5"),
        _mul("p6", "l6", "r6"),
        _mul("p7", "l7", "r7"),
        _add("w2a", "p5", "p1"),
        _add("w2", "w2a", "p6"),
        _add("w1", "p7", "p6"),
        _sub("w3", "w2", "p2"),
        _add("w5a", "p4", "w2"),
        _sc("w5", "1/2", "w5a"),
        _sub("c12a", "p1", "p3"),
        _sub("c12", "c12a", "w5"),
        _sub("c21", "w3", "w5"),
        _sc("c22", "1*s3", "w5"),
        _sub("c11a", "w3", "c12"),
        _sc("c11b", "2", "w1"),
        _sub("c11c", "c11a", "c11b"),
        _sc("c11", "1/3*s3", "c11c"),
    ]
    return _program("asopt", i)


def _powers() -> SLProgram:
    i = [
        _sc("r1", "1/2", "a22"),
        _sub("t2", "a21", "r1"),
        _sc("u1", "1/2", "b12"),
        _add("s1", "b11", "u1"),
        _sub("t3", "a12", "r1"),
        _sub("t0", "t2", "t3"),
        _sub("s2", "u1", "b22"),
        _sub("u2", "s1", "b22"),
        _add("t4", "a21", "r1"),
        _sub("r2", "t2", "a12"),
        _add("s4", "b22", "u1"),
        _sub("s0", "s1", "s4"),
        _sc("t5a", "1/2", "r2"),
        _add("t5", "a11", "t5a"),
        _sub("t1", "t5", "t0"),
        _sc("s3a", "1/2", "u2"),
        _sub("s3", "s3a", "b21"),
        _sub("s5", "s0", "s2"),
        _mul("p1", "t0", "s0"),
        _mul("p2", "t1", "s1"),
        _mul("p3", "t2", "s2"),
        _mul("p4", "t3", "s3"),
        _mul("p5", "t4", "s4"),
        _mul("p6", "t5", "s5"),
        _sub("p7a", "t4", "t0"),
        _sub("p7b", "s0", "s3"),
        _mul("p7", "p7a", "p7b"),
        _add("c22", "p5", "p3"),
        _sub("v1a", "p1", "p6"),
        _sub("v1", "v1a", "p3"),
        _add("v2", "p7", "p6"),
        _add("v3", "p4", "v1"),
        _sc("v4", "1/2", "c22"),
        _add("c12a", "p2", "v1"),
        _add("c12", "c12a", "v4"),
        _add("c21a", "v2", "v3"),
        _add("c21", "c21a", "v4"),
        _add("c11a", "c12", "v2"),
        _sub("c11b", "c11a", "v3"),
        _sc("c11", "1/2", "c11b"),
    ]
    return _program("powers", i)


def _powrot() -> SLProgram:
    i = [
        _sc("u1a", "1/2", "a12"),
        _add("u1", "u1a", "a22"),
        _sc("t1", "10/9", "u1"),
        _sc("t2a", "8/9", "a11"),
        _sc("t2b", "2/3", "a12"),
        _sub("t2", "t2a", "t2b"),
        _sc("t4", "10/9", "a12"),
        _sc("t3a", "8/9", "a21"),
        _add("t3b", "a11", "u1"),
        _sc("t3c", "4/9", "t3b"),
        _add("t3", "t3a", "t3c"),
        _sub("t0", "t2", "t3"),
        _add("t5", "t1", "t0"),
        _add("t6", "t4", "t0"),
        _sc("v1", "1/2", "b12"),
        _sub("s1", "v1", "b22"),
        _sub("s2", "v1", "b11"),
        _sc("s3", "5/4", "b12"),
        _sc("s4a", "2/5", "b22"),
        _sc("s4b", "4/5", "b21"),
        _sub("s4c", "s4a", "s4b"),
        _sc("s4d", "3/5", "s2"),
        _add("s4", "s4c", "s4d"),
        _add("s0", "s1", "s4"),
        _sub("s5", "s0", "s2"),
        _sub("s6", "s3", "s0"),
        _mul("p0", "t0", "s0"),
        _mul("p1", "t1", "s1"),
        _mul("p2", "t2", "s2"),
        _mul("p3", "t3", "s3"),
        _mul("p4", "t4", "s4"),
        _mul("p5", "t5", "s5"),
        _mul("p6", "t6", "s6"),
        _add("w1a", "p6", "p0"),
        _add("w1", "w1a", "p4"),
        _add("w2", "p5", "p6"),
        _add("w3", "p3", "w1"),
        _add("w4", "p2", "p4"),
        _add("w5", "p1", "w1"),
        _sc("w6", "9/20", "w3"),
        _sc("c11a", "9/8", "w4"),
        _sub("c11", "w6", "c11a"),
        _sc("c12", "9/10", "w3"),
        _sc("c21a", "27/40", "w5"),
        _sc("c21b", "9/8", "w2"),
        _sub("c21c", "c21a", "c21b"),
        _sc("c21d", "1/2", "c11"),
        _add("c21", "c21c", "c21d"),
        _sc("c22a", "9/10", "w5"),
        _sub("c22", "w6", "c22a"),
    ]
    return _program("powrot", i)


def _schwartzopt() -> SLProgram:
    # the sparse-core map itself: sign flips are free, twelve additions
    i = [
        _sub("l1", "a21", "a22"),
        _sc("l4", "-1", "a11"),
        _add("l6", "a11", "a22"),
        _add("l7", "a12", "a22"),
        _sc("r2", "-1", "b12"),
        _sub("r4", "b21", "b22"),
        _sub("r6", "b11", "b22"),
        _add("r7", "b12", "b22"),
        _mul("p1", "l1", "b11"),
        _mul("p2", "a21", "r2"),
        _mul("p3", "a12", "b21"),
        _mul("p4", "l4", "r4"),
        _mul("p5", "a22", "b22"),
        _mul("p6", "l6", "r6"),
        _mul("p7", "l7", "r7"),
        _add("c11", "p6", "p7"),
        _sub("c21", "p3", "p1"),
        _add("c12", "p2", "p4"),
        _add("c22a", "p1", "p4"),
        _add("c22b", "c22a", "p5"),
        _add("c22", "c22b", "p6"),
    ]
    return _program("schwartzopt", i)


_BUILDERS = {
    "asopt": _asopt,
    "powers": _powers,
    "powrot": _powrot,
    "schwartzopt": _schwartzopt,
}

#: programs whose published form computes the transposed product
_TRANSPOSED = {"asopt": True, "powers": False, "powrot": False, "schwartzopt": False}

_cache: dict[str, SLProgram] = {}


def slp_names() -> list[str]:
    return sorted(_BUILDERS)


def catalog_slp(name: str) -> SLProgram:
    """The named program, oriented so that running it on (A, B) yields
    A*B (for schwartzopt: the sparse-core bilinear map of its HM form)."""
    if name in _cache:
        return _cache[name]
    try:
        prog = _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown slp {name!r}; have {slp_names()}") from None
    if _TRANSPOSED[name]:
        prog = _transpose_inputs(prog)
    _cache[name] = prog
    return prog

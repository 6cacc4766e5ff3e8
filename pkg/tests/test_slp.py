"""SLP IR, the four optimizers, and the published program catalog."""

from fractions import Fraction

import numpy as np
import pytest

from fmmlab.catalog import catalog
from fmmlab.coeff import Coefficient
from fmmlab.hm import eval_bilinear
from fmmlab.matrices import MatrixQ
from fmmlab.slp import (
    Instr,
    SLProgram,
    compile_bilinear,
    count_ops,
    cse_optimize,
    eval_slp,
    from_matrix_naive,
    is_bilinear,
    kernel_decompose,
    slp_matrix,
    slp_product,
    transpose_slp,
)
from fmmlab.slp_catalog import catalog_slp, slp_names


def _basis2(idx):
    return MatrixQ([[1 if 2 * r + c == idx else 0 for c in range(2)] for r in range(2)])


def _equivalent_to_rep(prog, rep) -> bool:
    for ia in range(4):
        for ib in range(4):
            A, B = _basis2(ia), _basis2(ib)
            got = slp_product(prog, A, B)
            want = eval_bilinear(rep, A, B)
            if got != [want.data[0][0], want.data[0][1], want.data[1][0], want.data[1][1]]:
                return False
    return True


def _random_rational_matrix(rng, rows, cols):
    return MatrixQ(
        [
            [Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5))) for _ in range(cols)]
            for _ in range(rows)
        ]
    )


# -- IR basics ---------------------------------------------------------


def test_ssa_validation():
    prog = SLProgram(["x0"], [Instr("add", "t", "x0", "x0")], ["t"])
    prog.validate()
    bad = SLProgram(["x0"], [Instr("add", "x0", "x0", "x0")], ["x0"])
    with pytest.raises(ValueError):
        bad.validate()
    undef = SLProgram(["x0"], [Instr("add", "t", "x0", "y")], ["t"])
    with pytest.raises(ValueError):
        undef.validate()


def test_eval_slp_unbound_slot():
    prog = SLProgram(["x0", "x1"], [Instr("add", "t", "x0", "x1")], ["t"])
    with pytest.raises(KeyError):
        eval_slp(prog, {"x0": Coefficient(1)})


# -- naive -------------------------------------------------------------


def test_from_matrix_naive_counts_and_exactness():
    strassen = catalog("strassen")
    prog = from_matrix_naive(strassen.L)
    counts = count_ops(prog)
    assert (counts.adds, counts.scales) == (5, 0)
    assert slp_matrix(prog) == strassen.L

    prog = from_matrix_naive(MatrixQ.identity(4))
    assert count_ops(prog).adds == 0

    ptt = strassen.Pt.transpose()
    prog = from_matrix_naive(ptt)
    assert count_ops(prog).adds == 8
    assert slp_matrix(prog) == ptt


def test_naive_handles_zero_rows():
    M = MatrixQ([[0, 0], [1, 1]])
    prog = from_matrix_naive(M)
    assert slp_matrix(prog) == M


# -- cancellation-free CSE ----------------------------------------------


def test_cse_shared_pair():
    M = MatrixQ([[1, 1], [1, 1]])
    prog = cse_optimize(M)
    assert count_ops(prog).adds == 1
    assert slp_matrix(prog) == M


def test_cse_pair_hoisted_once():
    M = MatrixQ([[1, 1, 0], [1, 1, 1]])
    prog = cse_optimize(M)
    assert count_ops(prog).adds == 2
    assert slp_matrix(prog) == M


def test_cse_scaled_pattern():
    # rows share the pattern up to a scalar: still one hoist
    M = MatrixQ([[2, 2, 0], [3, 3, 1]])
    prog = cse_optimize(M)
    assert slp_matrix(prog) == M
    assert count_ops(prog).adds <= count_ops(from_matrix_naive(M)).adds


def test_cse_never_worse_than_naive_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        M = _random_rational_matrix(rng, int(rng.integers(2, 8)), int(rng.integers(2, 6)))
        prog = cse_optimize(M)
        assert slp_matrix(prog) == M
        assert count_ops(prog).adds <= count_ops(from_matrix_naive(M)).adds


def test_cse_winograd_left():
    wino = catalog("winograd")
    prog = cse_optimize(wino.L)
    assert slp_matrix(prog) == wino.L
    assert count_ops(prog).adds <= count_ops(from_matrix_naive(wino.L)).adds


# -- kernel decomposition -------------------------------------------------


def test_kernel_explicit_dependency():
    M = MatrixQ([[1, 0], [0, 1], [1, 1]])
    prog = kernel_decompose(M)
    assert slp_matrix(prog) == M
    assert count_ops(prog).adds == 1


def test_kernel_asopt_left():
    asopt = catalog("asopt")
    prog = kernel_decompose(asopt.L)
    assert slp_matrix(prog) == asopt.L
    assert asopt.L.rank() == 4
    assert count_ops(prog).adds <= count_ops(from_matrix_naive(asopt.L)).adds


def test_kernel_full_rank_falls_back():
    M = MatrixQ([[1, 0], [1, 1]])
    prog = kernel_decompose(M)
    assert slp_matrix(prog) == M


def test_kernel_never_worse_than_naive_random():
    rng = np.random.default_rng(4)
    for _ in range(30):
        M = _random_rational_matrix(rng, 7, 4)
        prog = kernel_decompose(M)
        assert slp_matrix(prog) == M
        assert count_ops(prog).adds <= count_ops(from_matrix_naive(M)).adds


def test_kernel_of_transpose_plus_transposition():
    # rank below the number of columns: optimize the transpose, transpose back
    M = MatrixQ([[1, 0, 1], [0, 1, 1]]).transpose()  # 3 cols rank 2 -> transpose has deps
    prog = kernel_decompose(M.transpose())
    back = transpose_slp(prog)
    assert slp_matrix(back) == M


# -- transposition ---------------------------------------------------------


def test_transpose_exact_on_random_matrices():
    rng = np.random.default_rng(1)
    for _ in range(50):
        rows, cols = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        M = _random_rational_matrix(rng, rows, cols)
        for i in range(rows):
            if all(v.is_zero() for v in M.data[i]):
                M.data[i][0] = Coefficient(1)
        for j in range(cols):
            if all(M.data[i][j].is_zero() for i in range(rows)):
                M.data[0][j] = Coefficient(1)
        prog = from_matrix_naive(M)
        tprog = transpose_slp(prog)
        assert slp_matrix(tprog) == M.transpose()
        ca, cb = count_ops(prog), count_ops(tprog)
        assert cb.adds - ca.adds == rows - cols
        assert cb.scales == ca.scales
        again = transpose_slp(tprog)
        assert slp_matrix(again) == M


def test_transpose_inner_product_identity():
    rng = np.random.default_rng(2)
    for _ in range(100):
        M = _random_rational_matrix(rng, 4, 5)
        prog = from_matrix_naive(M)
        tprog = transpose_slp(prog)
        x = [Coefficient(Fraction(int(rng.integers(-5, 6)), 2)) for _ in range(5)]
        y = [Coefficient(Fraction(int(rng.integers(-5, 6)), 2)) for _ in range(4)]
        Mx = eval_slp(prog, dict(zip(prog.inputs, x)))
        Mty = eval_slp(tprog, dict(zip(tprog.inputs, y)))
        lhs = sum((a * b for a, b in zip(Mx, y)), Coefficient(0))
        rhs = sum((a * b for a, b in zip(x, Mty)), Coefficient(0))
        assert lhs == rhs


def test_transpose_identity_program():
    prog = from_matrix_naive(MatrixQ.identity(3))
    tprog = transpose_slp(prog)
    assert slp_matrix(tprog) == MatrixQ.identity(3)
    assert count_ops(tprog).adds == 0


def test_transpose_rejects_bilinear():
    with pytest.raises(ValueError):
        transpose_slp(catalog_slp("schwartzopt"))


# -- bilinear compilation ---------------------------------------------------


@pytest.mark.parametrize("strategy", ["naive", "cse", "kernel"])
@pytest.mark.parametrize("name", ["strassen", "winograd", "asopt", "powers", "powrot"])
def test_compile_bilinear_equivalent(name, strategy):
    rep = catalog(name)
    prog = compile_bilinear(rep, strategy)
    assert is_bilinear(prog, rep.r)
    assert _equivalent_to_rep(prog, rep)


def test_compile_strassen_naive_adds():
    prog = compile_bilinear(catalog("strassen"), "naive")
    assert count_ops(prog).adds == 18


def test_compile_asopt_kernel_add_band():
    prog = compile_bilinear(catalog("asopt"), "kernel")
    counts = count_ops(prog)
    assert 24 <= counts.adds <= 30


def test_compile_matches_eval_on_random_pairs():
    rng = np.random.default_rng(8)
    rep = catalog("asopt")
    prog = compile_bilinear(rep, "kernel")
    for _ in range(100):
        A = _random_rational_matrix(rng, 2, 2)
        B = _random_rational_matrix(rng, 2, 2)
        got = slp_product(prog, A, B)
        want = eval_bilinear(rep, A, B)
        assert got == [want.data[0][0], want.data[0][1], want.data[1][0], want.data[1][1]]


# -- published program catalog ---------------------------------------------


def test_slp_names():
    assert slp_names() == ["asopt", "powers", "powrot", "schwartzopt"]
    with pytest.raises(KeyError):
        catalog_slp("nope")


def test_catalog_slp_counts():
    expectations = {
        "asopt": dict(adds=24, scales=12, muls=7),
        "powers": dict(adds=27, scales=6, muls=7, halvings=6),
        "powrot": dict(adds=24, scales=19, muls=7),
        "schwartzopt": dict(adds=12, scales=0, muls=7),
    }
    for name, want in expectations.items():
        counts = count_ops(catalog_slp(name))
        for key, val in want.items():
            assert getattr(counts, key) == val, (name, key)


@pytest.mark.parametrize(
    "slp_name,hm_name",
    [("asopt", "asopt"), ("powers", "powers"), ("powrot", "powrot"), ("schwartzopt", "schwartz_sparse")],
)
def test_catalog_slp_equivalent_to_rep(slp_name, hm_name):
    prog = catalog_slp(slp_name)
    assert is_bilinear(prog, 7)
    assert _equivalent_to_rep(prog, catalog(hm_name))


def test_catalog_slp_identity_product():
    eye = MatrixQ.identity(2)
    out = slp_product(catalog_slp("asopt"), eye, eye)
    assert out == [Coefficient(1), Coefficient(0), Coefficient(0), Coefficient(1)]


def test_powers_slp_equals_eval_on_random_rationals():
    rng = np.random.default_rng(12)
    prog = catalog_slp("powers")
    rep = catalog("powers")
    for _ in range(100):
        A = _random_rational_matrix(rng, 2, 2)
        B = _random_rational_matrix(rng, 2, 2)
        got = slp_product(prog, A, B)
        want = eval_bilinear(rep, A, B)
        assert got == [want.data[0][0], want.data[0][1], want.data[1][0], want.data[1][1]]

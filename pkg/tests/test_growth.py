"""Growth factors, weights, error-bound coefficients, Hoelder bounds."""

import math

import numpy as np
import pytest

from fmmlab.catalog import BRENT_VALID_NAMES, catalog
from fmmlab.growth import (
    BoundParams,
    frobenius_product,
    gamma21,
    gamma_01inf,
    gamma_q1inf,
    growth_report,
    holder_lower,
    kappa_mm,
    kappa_op,
    kappa_recurrence,
    lower_bound_const,
    norm23,
    q0,
    rank7_zeta_bound,
    zeta,
)

S2, S3, S5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)


def test_gamma21_closed_forms():
    assert gamma21(catalog("strassen")) == pytest.approx(12 + 4 / S2, abs=1e-12)
    assert gamma21(catalog("asopt")) == pytest.approx(16 / S3 + 4 / S2, abs=1e-12)
    assert gamma21(catalog("conventional")) == pytest.approx(8.0, abs=1e-12)
    assert gamma21(catalog("winograd")) == pytest.approx(7 + 8 / S2 + 9 / S3, abs=1e-12)
    assert gamma21(catalog("powers")) == pytest.approx(75 / 8 + 4 / S2, abs=1e-12)
    assert gamma21(catalog("powrot")) == pytest.approx(75 / 8 + 4 / S2, abs=1e-12)


def test_gamma_q1inf_values():
    assert gamma_q1inf(catalog("strassen"), 1) == pytest.approx(12.0)
    assert gamma_q1inf(catalog("winograd"), 1) == pytest.approx(18.0)
    assert gamma_q1inf(catalog("powers"), 1) == pytest.approx(13.0)
    assert gamma_q1inf(catalog("asopt"), 1) == pytest.approx(17.48, abs=0.01)
    assert gamma_q1inf(catalog("strassen"), 2) == pytest.approx(4 + 2 * S2, abs=1e-12)
    assert gamma_q1inf(catalog("winograd"), 2) == pytest.approx(8.0)
    assert gamma_q1inf(catalog("powers"), 2) == pytest.approx(6.05, abs=0.01)
    assert gamma_q1inf(catalog("asopt"), 2) == pytest.approx(5.97, abs=0.01)
    with pytest.raises(ValueError):
        gamma_q1inf(catalog("strassen"), 3)


def test_gamma_01inf_values():
    assert gamma_01inf(catalog("strassen")) == pytest.approx(12.0)
    assert gamma_01inf(catalog("winograd")) == pytest.approx(18.0)
    assert gamma_01inf(catalog("powers")) == pytest.approx(40.0)
    assert gamma_01inf(catalog("asopt")) == pytest.approx(98.54, abs=0.01)


def test_q0_values():
    assert q0(catalog("strassen")) == 8
    assert q0(catalog("winograd")) == 10
    assert q0(catalog("powers")) == 12
    assert q0(catalog("asopt")) == 15


def test_norm23_and_frobenius():
    assert norm23(catalog("strassen")) == pytest.approx(2 + 20 / S2, abs=1e-9)
    assert frobenius_product(catalog("strassen")) == pytest.approx(math.sqrt(12) ** 3, abs=1e-9)
    assert norm23(catalog("asopt")) == pytest.approx(16 / S3 + 4 / S2, abs=1e-9)
    assert frobenius_product(catalog("asopt")) == pytest.approx(math.sqrt(10) ** 3, abs=1e-9)
    assert frobenius_product(catalog("winograd")) == pytest.approx(math.sqrt(14) ** 3, abs=1e-9)
    assert norm23(catalog("winograd")) == pytest.approx(11 + 8 / S2 + 9 / S3, abs=1e-9)
    assert norm23(catalog("powers")) == pytest.approx(125 / 32 + 4 / S2 + 25 / (2 * S5), abs=1e-9)


def test_holder_ordering_all_catalog():
    for name in BRENT_VALID_NAMES + ("schwartz_sparse",):
        rpt = growth_report(catalog(name))
        assert rpt.holder_ordering_holds(), name


def test_gamma_21inf_below_gamma21():
    for name in BRENT_VALID_NAMES:
        rep = catalog(name)
        assert gamma_q1inf(rep, 2) <= gamma21(rep) + 1e-12, name


def test_kappa_mm_base_case_and_example():
    rep = catalog("strassen")
    assert kappa_mm(rep, BoundParams(k0=3, ell=0)) == pytest.approx(9.0)
    assert kappa_mm(rep, BoundParams(k0=1, ell=1)) == pytest.approx(108.0, abs=1e-9)


def test_kappa_monotone_in_depth():
    rep = catalog("strassen")
    values = [kappa_mm(rep, BoundParams(k0=1, ell=ell)) for ell in range(5)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("name", ["strassen", "winograd", "asopt", "powers"])
@pytest.mark.parametrize("norm", ["inf", "2"])
def test_kappa_mm_closed_form_matches_recurrence(name, norm):
    rep = catalog(name)
    gamma = gamma_q1inf(rep, 1 if norm == "inf" else 2)
    q = q0(rep)
    for ell in range(7):
        params = BoundParams(k0=1, ell=ell)
        closed = kappa_mm(rep, params, norm=norm)
        direct = kappa_recurrence(gamma, q, params, mode="mm")
        assert closed == pytest.approx(direct, rel=1e-12)


def test_kappa_mm_degenerate_gamma_equals_k():
    rep = catalog("conventional")  # gamma_{1,1,inf} = 2 = inner dimension
    params = BoundParams(k0=1, ell=3)
    closed = kappa_mm(rep, params)
    direct = kappa_recurrence(2.0, q0(rep), params, mode="mm")
    assert closed == pytest.approx(direct, rel=1e-12)


def test_kappa_op_base_and_recurrence():
    core = catalog("schwartz_sparse")
    q = q0(core)
    assert kappa_op(core, BoundParams(k0=1, ell=0, gamma0=1.0)) == pytest.approx(1.0 + q)
    gamma = gamma_q1inf(core, 1)
    for ell in range(7):
        params = BoundParams(k0=1, ell=ell, gamma0=1.0)
        closed = kappa_op(core, params)
        direct = kappa_recurrence(gamma, q, params, mode="op")
        assert closed == pytest.approx(direct, rel=1e-12)


def test_kappa_op_depth_ratio_follows_closed_form():
    core = catalog("schwartz_sparse")
    q = q0(core)
    gamma = gamma_q1inf(core, 1)
    for ell in range(5):
        a = kappa_op(core, BoundParams(ell=ell, gamma0=2.0))
        b = kappa_op(core, BoundParams(ell=ell + 1, gamma0=2.0))
        want = gamma * (1 + q / (1 + (1 + ell) * q))
        assert b / a == pytest.approx(want, rel=1e-12)


def test_holder_lower_examples():
    strassen = catalog("strassen")
    assert holder_lower(strassen, 1.0, 1.0) <= gamma21(strassen)
    val = holder_lower(catalog("asopt"), 1.0, 1000.0)
    assert val <= 12.0661
    assert val > 11.0


def test_holder_lower_random_pairs():
    rng = np.random.default_rng(5)
    for name in BRENT_VALID_NAMES:
        rep = catalog(name)
        g = gamma21(rep)
        for _ in range(20):
            y, z = (float(v) for v in rng.uniform(0.1, 4.0, 2))
            assert holder_lower(rep, y, z) <= g + 1e-9


def test_holder_lower_rejects_zero_rows():
    from fmmlab.coeff import Coefficient
    from fmmlab.hm import HMRep
    from fmmlab.matrices import MatrixQ

    L = MatrixQ.zeros(2, 4)
    L.data[0][0] = Coefficient(1)
    rep = HMRep(2, 2, 2, 2, L, MatrixQ.zeros(2, 4), MatrixQ.zeros(2, 4))
    with pytest.raises(ValueError):
        holder_lower(rep, 1.0, 1.0)


def test_lower_bound_constant_bracket():
    c = lower_bound_const()
    assert 11.7554696 < c < 11.76


def test_zeta_limit_matches_constant():
    assert rank7_zeta_bound(1e4) == pytest.approx(lower_bound_const(), abs=1e-3)
    assert zeta(1.0) > 0


def test_rank7_formulas_respect_lower_bound():
    bound = lower_bound_const()
    for name in BRENT_VALID_NAMES:
        rep = catalog(name)
        if rep.r == 7:
            assert gamma21(rep) >= bound - 1e-9, name

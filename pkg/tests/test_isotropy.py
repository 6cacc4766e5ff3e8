"""Isotropy action: group laws, Brent preservation, the (rho, xi) suborbit,
rotation invariance and the rotation sparsification search."""

import math
from fractions import Fraction

import numpy as np
import pytest

from fmmlab.catalog import catalog
from fmmlab.growth import gamma21
from fmmlab.hm import validate_brent
from fmmlab.isotropy import (
    Isotropy,
    apply,
    compose,
    identity_isotropy,
    inverse,
    param_isotropy,
    rotation_isotropy,
    search_rotations,
    _count_canonical_rows,
    _count_nonzeros,
)
from fmmlab.matrices import MatrixQ


def _random_unimodular(rng) -> MatrixQ:
    M = MatrixQ.identity(2)
    for _ in range(3):
        x = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        shear = MatrixQ([[1, x], [0, 1]]) if rng.random() < 0.5 else MatrixQ([[1, 0], [x, 1]])
        M = M @ shear
    if rng.random() < 0.5:
        M = M @ MatrixQ([[0, 1], [1, 0]])  # determinant -1
    return M


def _random_isotropy(rng) -> Isotropy:
    return Isotropy(_random_unimodular(rng), _random_unimodular(rng), _random_unimodular(rng))


def _same_rep(a, b) -> bool:
    return a.L == b.L and a.R == b.R and a.Pt == b.Pt


def test_identity_action():
    strassen = catalog("strassen")
    assert _same_rep(apply(identity_isotropy(), strassen), strassen)


def test_exact_action_preserves_validity():
    rng = np.random.default_rng(42)
    strassen = catalog("strassen")
    for _ in range(50):
        g = _random_isotropy(rng)
        assert g.is_unimodular()
        assert validate_brent(apply(g, strassen)).valid


def test_compose_identity_and_inverse():
    rng = np.random.default_rng(1)
    g = _random_isotropy(rng)
    e = identity_isotropy()
    assert _same_rep(apply(compose(g, e), catalog("strassen")), apply(g, catalog("strassen")))
    gi = compose(g, inverse(g))
    assert gi.U == MatrixQ.identity(2) and gi.V == MatrixQ.identity(2) and gi.W == MatrixQ.identity(2)


def test_action_is_homomorphism():
    rng = np.random.default_rng(9)
    strassen = catalog("strassen")
    for _ in range(10):
        g1, g2 = _random_isotropy(rng), _random_isotropy(rng)
        lhs = apply(compose(g1, g2), strassen)
        rhs = apply(g1, apply(g2, strassen))
        assert _same_rep(lhs, rhs)


def test_param_isotropy_identity_point():
    p = param_isotropy(1, 0, "exact")
    assert _same_rep(apply(p, catalog("strassen")), catalog("strassen"))


def test_param_isotropy_exact_shear_preserves_validity():
    out = apply(param_isotropy(1, 1, "exact"), catalog("strassen"))
    assert not _same_rep(out, catalog("strassen"))  # the shear really acted
    assert validate_brent(out).valid


def test_param_isotropy_rejects_nonpositive_rho():
    with pytest.raises(ValueError):
        param_isotropy(0, 0)
    with pytest.raises(ValueError):
        param_isotropy(-1, 0, "exact")


def test_optimal_point_reaches_minimum_gamma():
    g = param_isotropy((4.0 / 3.0) ** 0.25, -0.5)
    out = apply(g, catalog("strassen").to_float())
    assert gamma21(out) == pytest.approx(4 / math.sqrt(2) + 16 / math.sqrt(3), abs=1e-9)


def test_rotation_invariance_of_gamma21():
    rng = np.random.default_rng(3)
    strassen = catalog("strassen").to_float()
    base = gamma21(strassen)
    for _ in range(50):
        thetas = rng.uniform(0, 2 * math.pi, 3)
        out = apply(rotation_isotropy(*thetas), strassen)
        assert abs(gamma21(out) - base) < 1e-9


def test_singular_component_rejected():
    with pytest.raises(ValueError):
        Isotropy(MatrixQ.zeros(2, 2), MatrixQ.identity(2), MatrixQ.identity(2))


def test_mixed_backend_compose_rejected():
    with pytest.raises(TypeError):
        compose(identity_isotropy("exact"), identity_isotropy("float"))


def test_search_rotations_keeps_gamma_and_objective():
    strassen = catalog("strassen").to_float()
    out = search_rotations(strassen, objective="nnz", budget=90)
    assert abs(gamma21(out) - gamma21(strassen)) < 1e-9
    assert _count_nonzeros(out) <= _count_nonzeros(strassen)


def test_search_rotations_canonical_input_unchanged():
    conv = catalog("conventional").to_float()
    out = search_rotations(conv, objective="canonical_vectors", budget=60)
    assert _count_canonical_rows(out) >= _count_canonical_rows(conv)
    assert _count_canonical_rows(out) == 24  # every row canonical already


def test_search_rotations_asopt_keeps_canonical_rows():
    asopt = catalog("asopt").to_float()
    out = search_rotations(asopt, objective="canonical_vectors", budget=90)
    for comp in out.components():
        arr = np.abs(np.asarray(comp))
        assert int(np.sum(np.sum(arr > 1e-9, axis=1) == 1)) >= 1
    assert abs(gamma21(out) - gamma21(asopt)) < 1e-9


def test_exact_action_preserves_validity_on_other_formulas():
    rng = np.random.default_rng(17)
    for name in ("asopt", "winograd", "powers"):
        rep = catalog(name)
        for _ in range(10):
            g = _random_isotropy(rng)
            assert validate_brent(apply(g, rep)).valid, name

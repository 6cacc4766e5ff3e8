"""Orbit optimization: closed forms, cross-checks, minimizers, dyadic
approximations."""

import math

import numpy as np
import pytest

from fmmlab.catalog import catalog
from fmmlab.growth import gamma21, lower_bound_const
from fmmlab.hm import validate_brent
from fmmlab.isotropy import apply, param_isotropy
from fmmlab.orbit import (
    dyadic_approx_rep,
    frobenius_gradient,
    frobenius_objective,
    gamma_on_orbit,
    minimize_frobenius,
    minimize_gamma_orbit,
)

OPT_GAMMA = 2 * math.sqrt(2) + 16 / math.sqrt(3)
OPT_RHO = (4.0 / 3.0) ** 0.25


def test_gamma_on_orbit_special_points():
    assert gamma_on_orbit(OPT_RHO, -0.5) == pytest.approx(OPT_GAMMA, abs=1e-12)
    assert gamma_on_orbit(1.0, 0.0) == pytest.approx(gamma21(catalog("strassen")), abs=1e-12)
    with pytest.raises(ValueError):
        gamma_on_orbit(-1.0, 0.0)


def test_gamma_on_orbit_matches_apply_pipeline():
    rng = np.random.default_rng(7)
    strassen = catalog("strassen").to_float()
    for _ in range(100):
        rho = float(rng.uniform(0.5, 2.0))
        xi = float(rng.uniform(-1.5, 0.5))
        closed = gamma_on_orbit(rho, xi)
        piped = gamma21(apply(param_isotropy(rho, xi), strassen))
        assert abs(closed - piped) < 1e-9


def test_minimize_gamma_orbit_default():
    pt = minimize_gamma_orbit()
    assert pt.gamma == pytest.approx(12.06603143, abs=1e-5)
    assert pt.rho == pytest.approx(OPT_RHO, abs=1e-4)
    assert pt.xi == pytest.approx(-0.5, abs=1e-4)
    assert pt.gamma >= lower_bound_const() - 1e-9


def test_minimize_gamma_orbit_single_start_converges():
    pt = minimize_gamma_orbit(starts=4, tol=1e-12)
    assert pt.gamma == pytest.approx(OPT_GAMMA, abs=1e-5)


def test_minimize_gamma_orbit_loose_tolerance():
    pt = minimize_gamma_orbit(starts=8, tol=1e-2)
    assert pt.gamma <= OPT_GAMMA + 1e-2


def test_frobenius_objective_matches_kron_oracle():
    rng = np.random.default_rng(3)
    L = catalog("strassen").L.to_float()
    for _ in range(100):
        r, s = (float(v) for v in rng.uniform(0.3, 2.0, 2))
        x, y = (float(v) for v in rng.uniform(-1.5, 1.5, 2))
        W = np.array([[r, x], [0, 1 / r]])
        V = np.array([[s, y], [0, 1 / s]])
        oracle = float(np.sum((L @ np.kron(V, W)) ** 2))
        assert frobenius_objective(r, x, s, y) == pytest.approx(oracle, rel=1e-12)


def test_frobenius_objective_identity_point():
    # identity transform leaves the component untouched: the value is its
    # squared Frobenius norm
    L = catalog("strassen").L.to_float()
    assert frobenius_objective(1, 0, 1, 0) == pytest.approx(float(np.sum(L * L)))
    with pytest.raises(ValueError):
        frobenius_objective(0, 0, 1, 0)


def test_frobenius_gradient_matches_central_differences():
    rng = np.random.default_rng(5)

    def fd(p, h=1e-6):
        out = []
        for i in range(4):
            up, down = list(p), list(p)
            up[i] += h
            down[i] -= h
            out.append((frobenius_objective(*up) - frobenius_objective(*down)) / (2 * h))
        return np.array(out)

    for _ in range(100):
        p = [
            float(rng.uniform(0.3, 2.0)),
            float(rng.uniform(-1.5, 1.5)),
            float(rng.uniform(0.3, 2.0)),
            float(rng.uniform(-1.5, 1.5)),
        ]
        a = frobenius_gradient(*p)
        b = fd(p)
        scale = max(1.0, float(np.max(np.abs(a))))
        assert float(np.max(np.abs(a - b))) / scale < 1e-5


def test_minimize_frobenius_reaches_ten():
    point, value = minimize_frobenius()
    assert value == pytest.approx(10.0, abs=1e-6)
    expected = np.array(
        [3**0.25 / math.sqrt(2), 3**0.25 / math.sqrt(6), 3**0.25 / math.sqrt(2), 3**0.25 / math.sqrt(6)]
    )
    assert np.allclose(np.abs(point), expected, atol=1e-5)
    assert float(np.linalg.norm(frobenius_gradient(*point))) < 1e-6
    # product of the three component norms at the optimum
    assert math.sqrt(value) ** 3 == pytest.approx(math.sqrt(10) ** 3, abs=1e-6)


def test_frobenius_hessian_positive_at_optimum():
    point, _ = minimize_frobenius()

    def fd_hess(p, h=1e-4):
        H = np.zeros((4, 4))
        for i in range(4):
            for j in range(4):
                pp, pm, mp, mm = (list(p) for _ in range(4))
                pp[i] += h
                pp[j] += h
                pm[i] += h
                pm[j] -= h
                mp[i] -= h
                mp[j] += h
                mm[i] -= h
                mm[j] -= h
                H[i, j] = (
                    frobenius_objective(*pp)
                    - frobenius_objective(*pm)
                    - frobenius_objective(*mp)
                    + frobenius_objective(*mm)
                ) / (4 * h * h)
        return H

    eig = np.linalg.eigvalsh(fd_hess(point))
    assert np.all(eig > 0)


def test_dyadic_approx_valid_and_decreasing():
    gammas = []
    for order in range(2, 9):
        rep = dyadic_approx_rep(order)
        assert validate_brent(rep).valid
        gammas.append(gamma21(rep))
    assert gammas[0] <= 12.25
    assert all(b <= a + 1e-12 for a, b in zip(gammas, gammas[1:]))
    assert gammas[-1] == pytest.approx(OPT_GAMMA, abs=1e-4)
    with pytest.raises(ValueError):
        dyadic_approx_rep(0)


def test_minimizers_accept_more_starts_than_grid():
    pt = minimize_gamma_orbit(starts=12)
    assert pt.gamma == pytest.approx(OPT_GAMMA, abs=1e-5)
    _, value = minimize_frobenius(starts=10)
    assert value == pytest.approx(10.0, abs=1e-6)

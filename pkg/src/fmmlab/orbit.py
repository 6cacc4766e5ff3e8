"""Numerical optimization over the diagonal-shear suborbit: minimizing the
gamma21 growth factor, minimizing the product of component Frobenius norms,
and generating exact dyadic-rational approximations of the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .catalog import catalog
from .hm import HMRep
from .isotropy import apply, param_isotropy

__all__ = [
    "OrbitPoint",
    "gamma_on_orbit",
    "minimize_gamma_orbit",
    "frobenius_objective",
    "frobenius_gradient",
    "minimize_frobenius",
    "dyadic_approx_rep",
]


@dataclass
class OrbitPoint:
    rho: float
    xi: float
    gamma: float


def gamma_on_orbit(rho: float, xi: float) -> float:
    """gamma21 of the diagonal-shear orbit point, in closed form:

        gamma = 2 sqrt(2) + 3 ((1+x)^2 + r)((x-1)^2 + r) / (r sqrt(r)),
        r = 4 / rho^4,  x = 2 xi + 1.

    Agrees with gamma21(apply(param_isotropy(rho, xi), strassen)) to 1e-9.
    """
    rho = float(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    r = 4.0 / rho**4
    x = 2.0 * float(xi) + 1.0
    amp = ((1.0 + x) ** 2 + r) * ((x - 1.0) ** 2 + r) / (r * math.sqrt(r))
    return 2.0 * math.sqrt(2.0) + 3.0 * amp


_RESTART_GRID = [
    (0.5, -1.5),
    (0.5, 0.5),
    (0.8, -0.8),
    (1.0, 0.0),
    (1.2, -0.5),
    (1.5, -1.0),
    (2.0, -1.5),
    (2.0, 0.5),
]


def _extended_starts(grid: list[tuple], starts: int, lo, hi, seed: int = 1234) -> list[tuple]:
    """The fixed grid, extended deterministically when more restarts are
    requested."""
    points = list(grid[:starts])
    if starts > len(grid):
        rng = np.random.default_rng(seed)
        extra = rng.uniform(lo, hi, size=(starts - len(grid), len(lo)))
        points += [tuple(float(v) for v in row) for row in extra]
    return points


def minimize_gamma_orbit(starts: int = 8, tol: float = 1e-12) -> OrbitPoint:
    """Multi-start Nelder-Mead on gamma_on_orbit over (rho, xi), restarting
    from a fixed grid; deterministic.  With defaults the minimum lands at
    (rho, xi) ~ (1.0745699, -0.5) with value ~ 12.0660314."""
    if starts < 1:
        raise ValueError("starts must be >= 1")

    def objective(p):
        rho, xi = p
        if rho <= 1e-8:
            return 1e12
        return gamma_on_orbit(rho, xi)

    best = None
    for rho0, xi0 in _extended_starts(_RESTART_GRID, starts, (0.5, -1.5), (2.0, 0.5)):
        res = minimize(
            objective,
            x0=np.array([rho0, xi0]),
            method="Nelder-Mead",
            options=dict(xatol=tol, fatol=tol, maxiter=4000, maxfev=8000),
        )
        key = (res.fun, res.x[0], res.x[1])
        if best is None or key < best:
            best = key
    value, rho, xi = best
    return OrbitPoint(rho=float(rho), xi=float(xi), gamma=float(value))


def frobenius_objective(r: float, x: float, s: float, y: float) -> float:
    """Squared Frobenius norm of the Strassen left component transformed by
    the Kronecker product of two unit-determinant upper-triangular factors:
    |L (V kron W)|_F^2 with W = [[r, x], [0, 1/r]], V = [[s, y], [0, 1/s]],
    written out as an explicit closed form (the oracle identity is covered
    by tests)."""
    if r == 0 or s == 0:
        raise ValueError("r and s must be nonzero")
    rs = r * s
    return (
        4 * r**2 * s**2
        + 3 * r**2 * y**2
        + 3 * s**2 * x**2
        + x**2 * y**2
        + r**2 / s**2
        + s**2 / r**2
        + 1.0 / rs**2
        + (x / s + 1.0 / rs) ** 2
        + (y / r - 1.0 / rs) ** 2
        + (x / s - x * y) ** 2
        + (y / r + x * y) ** 2
        + (x * y + 1.0 / rs) ** 2
        + (s / r + x * s) ** 2
        + (r / s - r * y) ** 2
    )


def _strassen_left_float() -> np.ndarray:
    return catalog("strassen").L.to_float()


def _kron_factors(r, x, s, y):
    W = np.array([[r, x], [0.0, 1.0 / r]])
    V = np.array([[s, y], [0.0, 1.0 / s]])
    dW = {"r": np.array([[1.0, 0.0], [0.0, -1.0 / r**2]]), "x": np.array([[0.0, 1.0], [0.0, 0.0]])}
    dV = {"s": np.array([[1.0, 0.0], [0.0, -1.0 / s**2]]), "y": np.array([[0.0, 1.0], [0.0, 0.0]])}
    return W, V, dW, dV


def frobenius_gradient(r: float, x: float, s: float, y: float) -> np.ndarray:
    """Analytic gradient of the objective, via d|L (V kron W)|_F^2
    = 2 <L (V kron W), L (dV kron W + V kron dW)>."""
    if r == 0 or s == 0:
        raise ValueError("r and s must be nonzero")
    L = _strassen_left_float()
    W, V, dW, dV = _kron_factors(r, x, s, y)
    E = L @ np.kron(V, W)
    grads = []
    for var in ("r", "x", "s", "y"):
        if var in dW:
            D = np.kron(V, dW[var])
        else:
            D = np.kron(dV[var], W)
        grads.append(2.0 * float(np.sum(E * (L @ D))))
    return np.array(grads)


def minimize_frobenius(starts: int = 8, tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """Minimize the objective over (r, x, s, y) with r, s > 0 (handled by
    optimizing log r, log s); returns (point, value).  The minimum value is
    10, attained at (3^{1/4}/sqrt2, 3^{1/4}/sqrt6, 3^{1/4}/sqrt2,
    -3^{1/4}/sqrt6) up to the sign symmetry."""
    if starts < 1:
        raise ValueError("starts must be >= 1")

    def objective(p):
        lr, x, ls, y = p
        return frobenius_objective(math.exp(lr), x, math.exp(ls), y)

    seeds = [
        (0.0, 0.0, 0.0, 0.0),
        (0.2, 0.5, 0.2, -0.5),
        (-0.3, 0.3, 0.1, -0.2),
        (0.1, -0.4, -0.2, 0.4),
        (0.3, 0.6, 0.3, -0.6),
        (-0.2, 0.2, -0.2, -0.3),
        (0.05, 0.45, 0.05, -0.45),
        (0.15, 0.35, -0.1, -0.35),
    ]
    best = None
    for seed in _extended_starts(seeds, starts, (-0.5, -1.0, -0.5, -1.0), (0.5, 1.0, 0.5, 1.0)):
        res = minimize(
            objective,
            x0=np.array(seed),
            method="Nelder-Mead",
            options=dict(xatol=tol, fatol=tol, maxiter=8000, maxfev=16000),
        )
        key = (res.fun, tuple(res.x))
        if best is None or key < best:
            best = key
    value, p = best
    lr, x, ls, y = p
    point = np.array([math.exp(lr), x, math.exp(ls), y])
    return point, float(value)


def _dyadic(value: float, order: int) -> Fraction:
    scale = 1 << order
    return Fraction(round(value * scale), scale)


def dyadic_approx_rep(order: int) -> HMRep:
    """Exact formula from the dyadic rounding of the gamma-optimal orbit
    point: rho and xi are rounded to denominator 2^order, the resulting
    exact unit-determinant triple is applied to the Strassen formula.
    Always Brent-valid; gamma21 decreases toward the orbit minimum as the
    order grows."""
    if order < 1:
        raise ValueError("order must be >= 1")
    rho_star = (4.0 / 3.0) ** 0.25
    xi_star = -0.5
    rho = _dyadic(rho_star, order)
    if rho <= 0:
        rho = Fraction(1)
    xi = _dyadic(xi_star, order)
    g = param_isotropy(rho, xi, backend="exact")
    rep = apply(g, catalog("strassen"))
    return rep.with_name(f"dyadic{order}")

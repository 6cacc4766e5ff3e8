"""Norms, growth factors, the Q0 weight, forward error-bound coefficients,
and the Hoelder upper/lower bounds for HM representations.

All quantities are computed from exact coefficients where available and
rounded late; the published closed-form values are reproduced to well below
the table tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coeff import Coefficient
from .hm import HMRep
from .matrices import MatrixQ

__all__ = [
    "GrowthReport",
    "BoundParams",
    "gamma21",
    "gamma_q1inf",
    "gamma_01inf",
    "q0",
    "norm23",
    "frobenius_product",
    "growth_report",
    "kappa_mm",
    "kappa_op",
    "kappa_recurrence",
    "holder_lower",
    "zeta",
    "lower_bound_const",
    "rank7_zeta_bound",
]


def _abs_matrix(comp) -> np.ndarray:
    if isinstance(comp, MatrixQ):
        return np.array([[abs(v).to_float() for v in row] for row in comp.data])
    return np.abs(np.asarray(comp, dtype=np.float64))


def _row_qnorms(comp, q: int) -> np.ndarray:
    """Row q-norms (q in {0, 1, 2}); exact accumulation, one final rounding."""
    if isinstance(comp, MatrixQ):
        if q == 0:
            return np.array([float(comp.row_nnz(i)) for i in range(comp.rows)])
        if q == 1:
            sums = [sum((abs(v) for v in comp.row(i)), Coefficient(0)) for i in range(comp.rows)]
            return np.array([s.to_float() for s in sums])
        sq = [sum((v * v for v in comp.row(i)), Coefficient(0)) for i in range(comp.rows)]
        return np.sqrt(np.array([s.to_float() for s in sq]))
    arr = np.asarray(comp, dtype=np.float64)
    if q == 0:
        return np.sum(arr != 0.0, axis=1).astype(float)
    if q == 1:
        return np.sum(np.abs(arr), axis=1)
    return np.sqrt(np.sum(arr * arr, axis=1))


def gamma21(rep: HMRep) -> float:
    """Sum over products of the three Euclidean row norms."""
    nl, nr, npt = (_row_qnorms(c, 2) for c in rep.components())
    return float(np.sum(nl * nr * npt))


def gamma_q1inf(rep: HMRep, q: int = 1) -> float:
    """max over output coordinates of sum_i |L_i|_q |R_i|_q |p_{i,k}|."""
    if q not in (1, 2):
        raise ValueError("q must be 1 or 2")
    nl = _row_qnorms(rep.L, q)
    nr = _row_qnorms(rep.R, q)
    pabs = _abs_matrix(rep.Pt)
    return float(np.max((nl * nr) @ pabs))


def gamma_01inf(rep: HMRep) -> float:
    """Hamming-weight variant scaled by the three max-abs coefficients.

    The p factor is the nonzero indicator (its Hamming weight), so the
    core counts operand fan-in per output coordinate; all coefficient
    magnitudes enter through the max-abs product.
    """
    nl = _row_qnorms(rep.L, 0)
    nr = _row_qnorms(rep.R, 0)
    p_ind = (_abs_matrix(rep.Pt) != 0.0).astype(float)
    core = float(np.max((nl * nr) @ p_ind))
    scale = 1.0
    for comp in rep.components():
        if isinstance(comp, MatrixQ):
            scale *= comp.max_abs_float()
        else:
            scale *= float(np.max(np.abs(np.asarray(comp))))
    return core * scale


def q0(rep: HMRep) -> int:
    """max over output coordinates j of  nnz(column j of Pt) plus the
    largest nnz(L_i)+nnz(R_i) among products i feeding coordinate j."""
    L, R, Pt = rep.components()
    if isinstance(Pt, MatrixQ):
        pt_nz = np.array([[not v.is_zero() for v in row] for row in Pt.data])
    else:
        pt_nz = np.asarray(Pt) != 0.0
    wl = _row_qnorms(L, 0)
    wr = _row_qnorms(R, 0)
    best = 0
    for j in range(pt_nz.shape[1]):
        rows = np.nonzero(pt_nz[:, j])[0]
        if len(rows) == 0:
            continue
        val = len(rows) + int(np.max(wl[rows] + wr[rows]))
        best = max(best, val)
    return best


def norm23(rep: HMRep) -> float:
    """Product over components of the cubic mean norm (sum of cubed row
    2-norms, cube root)."""
    out = 1.0
    for comp in rep.components():
        norms = _row_qnorms(comp, 2)
        out *= float(np.sum(norms**3)) ** (1.0 / 3.0)
    return out


def frobenius_product(rep: HMRep) -> float:
    out = 1.0
    for comp in rep.components():
        if isinstance(comp, MatrixQ):
            sq = sum((v * v for row in comp.data for v in row), Coefficient(0))
            out *= math.sqrt(sq.to_float())
        else:
            out *= float(np.sqrt(np.sum(np.asarray(comp) ** 2)))
    return out


@dataclass
class GrowthReport:
    gamma21: float
    gamma_11inf: float
    gamma_21inf: float
    gamma_01inf: float
    q0: int
    norm23: float
    frobenius_product: float

    def holder_ordering_holds(self, slack: float = 1e-9) -> bool:
        return (
            self.gamma21 <= self.norm23 + slack
            and self.norm23 <= self.frobenius_product + slack
        )


def growth_report(rep: HMRep) -> GrowthReport:
    return GrowthReport(
        gamma21=gamma21(rep),
        gamma_11inf=gamma_q1inf(rep, 1),
        gamma_21inf=gamma_q1inf(rep, 2),
        gamma_01inf=gamma_01inf(rep),
        q0=q0(rep),
        norm23=norm23(rep),
        frobenius_product=frobenius_product(rep),
    )


@dataclass
class BoundParams:
    """Parameters of the recursive error bound.

    k0 is the base-case inner dimension (the recursion stops at k0 x k0
    blocks), ell the recursion depth, eps the unit roundoff.  g0/gamma0
    parametrize the general bilinear-operator variant.
    """

    k0: int = 1
    ell: int = 0
    g0: int = 1
    gamma0: float = 1.0
    eps: float = 2.0**-53

    def __post_init__(self):
        if self.k0 < 1 or self.ell < 0 or self.eps <= 0:
            raise ValueError("require k0 >= 1, ell >= 0, eps > 0")


def kappa_recurrence(gamma: float, q0_val: float, params: BoundParams, mode: str = "mm") -> float:
    """Directly iterate t_ell = (Theta0 Theta^{ell-1} Q0 + t_{ell-1}) gamma.

    For matrix multiplication (Theta, Theta0, t0) = (k, k0, k0^2); for a
    general bilinear operator (gamma, gamma0, (1+Q0) gamma0).
    """
    if mode == "mm":
        theta, theta0 = 2.0, float(params.k0)
        t = float(params.k0) ** 2
    elif mode == "op":
        theta, theta0 = gamma, params.gamma0
        t = (1.0 + q0_val) * params.gamma0
    else:
        raise ValueError("mode must be 'mm' or 'op'")
    for level in range(1, params.ell + 1):
        t = (theta0 * theta ** (level - 1) * q0_val + t) * gamma
    return t


def kappa_mm(
    rep: HMRep,
    params: BoundParams,
    norm: str = "inf",
    gamma_value: Optional[float] = None,
    q0_value: Optional[float] = None,
) -> float:
    """Forward error coefficient for a recursive matrix-multiplication
    formula, closed form:

        kappa = (K/k0)^{log_k gamma} (k0^2 + Q0 k0 gamma/(gamma-k))
                - Q0 K gamma/(gamma-k),  K = k0 k^ell.

    ``norm`` selects the growth factor: "inf" uses the 1,1,inf variant (the
    max-norm bound), "2" the 2,1,inf variant.  When gamma equals the inner
    dimension the closed form degenerates and the recurrence value is
    returned instead.
    """
    k = rep.k
    gamma = gamma_value
    if gamma is None:
        gamma = gamma_q1inf(rep, 1 if norm == "inf" else 2)
    q = q0_value if q0_value is not None else float(q0(rep))
    if gamma < k - 1e-12:
        raise ValueError(f"growth factor {gamma} below inner dimension {k}")
    if abs(gamma - k) < 1e-9:
        return kappa_recurrence(gamma, q, params, mode="mm")
    k0, ell = params.k0, params.ell
    K = k0 * k**ell
    ratio = q * gamma / (gamma - k)
    return (K / k0) ** math.log(gamma, k) * (k0**2 + ratio * k0) - ratio * K


def kappa_op(
    rep: HMRep,
    params: BoundParams,
    gamma_value: Optional[float] = None,
    q0_value: Optional[float] = None,
) -> float:
    """Forward error coefficient for a general recursive bilinear operator:

        kappa = (G/g0)^{log_g gamma} gamma0 (1 + (1 + log_g(G/g0)) Q0)

    with G = g0 g^ell; log_g(G/g0) is just the depth ell.
    """
    g = rep.m * rep.n
    if g <= 1:
        raise ValueError("output dimension must exceed 1")
    gamma = gamma_value if gamma_value is not None else gamma_q1inf(rep, 1)
    q = q0_value if q0_value is not None else float(q0(rep))
    ell = params.ell
    return gamma**ell * params.gamma0 * (1.0 + (1.0 + ell) * q)



def holder_lower(rep: HMRep, y: float, z: float) -> float:
    """Lower bound on gamma21: the larger of

        r^{1+3z} * prod_M |M|_{2,-1/z}   and
        |L|_{2,-1/y} |R|_{2,-1/z} |P|_{2,1/(1+y+z)}.
    """
    if y <= 0 or z <= 0:
        raise ValueError("y and z must be positive")
    r = rep.r
    # r^{1+3z} and the negative-exponent norms overflow/underflow
    # separately for large z, so combine them in log space.
    log_first = (1.0 + 3.0 * z) * math.log(r)
    for comp in rep.components():
        norms = _row_qnorms(comp, 2)
        if np.any(norms == 0.0):
            raise ValueError("zero row makes the negative-exponent norm degenerate")
        log_first += -z * math.log(float(np.sum(norms ** (-1.0 / z))))
    first = math.exp(log_first)

    def log_neg(comp, w):
        norms = _row_qnorms(comp, 2)
        if np.any(norms == 0.0):
            raise ValueError("zero row makes the negative-exponent norm degenerate")
        return -w * math.log(float(np.sum(norms ** (-1.0 / w))))

    def log_pos(comp, p):
        # log of (sum norms^p)^(1/p), stable for tiny p
        norms = _row_qnorms(comp, 2)
        logs = p * np.log(norms)
        peak = float(np.max(logs))
        return (peak + math.log(float(np.sum(np.exp(logs - peak))))) / p

    second = math.exp(
        log_neg(rep.L, y) + log_neg(rep.R, z) + log_pos(rep.Pt, 1.0 / (1.0 + y + z))
    )
    return max(first, second)


def zeta(z: float) -> float:
    """The orbit-minimum value of the negative-exponent row-norm bound:
    (2^{-1/(2z)} + 3^{1/(2z)} 2^{-1/z} * 6)^{-z}."""
    if z <= 0:
        raise ValueError("z must be positive")
    base = 2.0 ** (-1.0 / (2.0 * z)) + 3.0 ** (1.0 / (2.0 * z)) * 2.0 ** (-1.0 / z) * 6.0
    return base ** (-z)


def rank7_zeta_bound(z: float) -> float:
    """7^{1+3z} * zeta(z)^3, evaluated in log space (the factors overflow
    and underflow separately for large z).  Converges to
    :func:`lower_bound_const` as z grows."""
    if z <= 0:
        raise ValueError("z must be positive")
    base = 2.0 ** (-1.0 / (2.0 * z)) + 3.0 ** (1.0 / (2.0 * z)) * 2.0 ** (-1.0 / z) * 6.0
    return math.exp((1.0 + 3.0 * z) * math.log(7.0) - 3.0 * z * math.log(base))


def lower_bound_const() -> float:
    """(28/9) 2^{11/14} 3^{5/7}: no rank-7 formula's gamma21 goes below it."""
    return 28.0 / 9.0 * 2.0 ** (11.0 / 14.0) * 3.0 ** (5.0 / 7.0)

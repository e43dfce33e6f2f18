"""psi_tau, asymptotic efficiency, AR(1) influence functions and robust order
selection.

The tau-estimator solves an M-estimating equation with the data adaptive
score ``psi_tau(x) = W psi1(x) + psi2(x)``.  The finite-sample weight ``W_n``
uses the residuals at hand; the asymptotic weight replaces the sample sums by
standard normal expectations with the M-scale set to one, which is the value
the consistency constant ``b1`` enforces at the Gaussian model.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels as K
from .ar import estimate_ar_durbin_levinson
from .core import ArmaParams, RhoFamily, as_series
from .scale import TIGHT_MAXIT, TIGHT_TOL, _sym, expect_normal

CRITERIA = ("AIC", "SIC", "HQC")


class DegenerateWeightError(ArithmeticError):
    """The denominator of the tau weight is not positive."""


def _weight(u, family: RhoFamily, mean) -> float:
    num = mean(lambda z: 2.0 * family.rho2(z) - family.psi2(z) * z, u)
    den = mean(lambda z: family.psi1(z) * z, u)
    if not den > 0:
        raise DegenerateWeightError("psi1(u) u averages to a non-positive value")
    return float(num / den)


def tau_weight(residuals, family: RhoFamily) -> float:
    """Finite-sample weight ``W_n`` of the residual set.

    ``W_n = sum[2 rho2(u) - psi2(u) u] / sum[psi1(u) u]`` with ``u`` the
    residuals standardised by their M-scale.
    """
    r = np.ascontiguousarray(as_series(residuals))
    s, _ = K.m_scale_k(r, family.c1, family.b1, family.rho_kind, TIGHT_TOL, TIGHT_MAXIT)
    if s == 0.0:
        raise DegenerateWeightError("residuals have zero M-scale")
    return _weight(r / s, family, lambda f, u: np.sum(f(u)))


def psi_tau(x, residuals, family: RhoFamily):
    """Data adaptive score ``W_n psi1(x) + psi2(x)`` at standardised ``x``."""
    w = tau_weight(residuals, family)
    return w * family.psi1(x) + family.psi2(x)


def asymptotic_weight(family: RhoFamily, nodes: int = 200) -> float:
    """Population weight ``W`` at the standard normal model."""
    knots = _sym(family.knots)
    return _weight(None, family, lambda f, _: expect_normal(f, knots, nodes))


def psi_tau_asymptotic(x, family: RhoFamily, weight: Optional[float] = None):
    w = asymptotic_weight(family) if weight is None else weight
    return w * family.psi1(x) + family.psi2(x)


def dpsi_tau_asymptotic(x, family: RhoFamily, weight: Optional[float] = None):
    """Derivative of the asymptotic ``psi_tau`` (piecewise polynomial)."""
    w = asymptotic_weight(family) if weight is None else weight
    return w * family.dpsi1(x) + family.dpsi2(x)


def asymptotic_efficiency(family: RhoFamily, nodes: int = 200) -> float:
    """Gaussian efficiency ``E[psi_tau']**2 / E[psi_tau**2]`` relative to ML."""
    w = asymptotic_weight(family, nodes)
    knots = _sym(family.knots)
    e1 = expect_normal(lambda z: dpsi_tau_asymptotic(z, family, w), knots, nodes)
    e2 = expect_normal(lambda z: psi_tau_asymptotic(z, family, w) ** 2, knots, nodes)
    return float(e1 * e1 / e2)


# --- influence function -------------------------------------------------------

@dataclass(frozen=True)
class IfCurve:
    cw_grid: np.ndarray
    if_values: np.ndarray
    ges: float

    @classmethod
    def from_values(cls, cw, values) -> "IfCurve":
        values = np.asarray(values, dtype=float)
        return cls(np.asarray(cw, dtype=float), values,
                   float(np.max(np.abs(values))) if values.size else 0.0)


def _if_terms(phi: float, cw: float, family: RhoFamily, w: float, nodes: int):
    knots = _sym(family.knots)
    s = np.sqrt(1.0 - phi * phi)
    e0 = expect_normal(lambda z: dpsi_tau_asymptotic(z, family, w), knots, nodes)
    # the innovation a_1 is independent of x_0, so E[x_0 psi(.)] vanishes
    m = expect_normal(lambda z: psi_tau_asymptotic(z, family, w), knots, nodes,
                      loc=-phi * cw)
    return e0, cw * s * m


def influence_function_ar1(phi: float, cw_grid: Sequence[float], family: RhoFamily,
                           *, nodes: int = 200, symmetric: bool = True) -> IfCurve:
    """Influence function of the tau-estimator of an AR(1) under additive
    outliers of magnitude ``c_w``.

    ``IF(c_w) = sqrt(1 - phi**2) E1 / E0`` with ``E0 = E[nu**2 psi_tau'(u)]``
    for independent standard normals and
    ``E1 = E[(x_0 + c_w) sqrt(1 - phi**2) psi_tau(a_1 - phi c_w)]``.

    Parameters
    ----------
    phi : float
        AR coefficient, ``|phi| < 1``.
    cw_grid : sequence of float
        Outlier magnitudes.
    symmetric : bool
        Average the point masses at ``+c_w`` and ``-c_w``; otherwise the
        single-sign contaminant is used.  The two agree because the
        integrand is even in ``c_w``.
    """
    if not -1.0 < phi < 1.0:
        raise ValueError("|phi| must be below one")
    w = asymptotic_weight(family, nodes)
    vals = []
    for c in np.asarray(cw_grid, dtype=float):
        e0, e1 = _if_terms(phi, c, family, w, nodes)
        if symmetric:
            e1 = 0.5 * (e1 + _if_terms(phi, -c, family, w, nodes)[1])
        if e0 == 0.0:
            raise ZeroDivisionError("E0 vanishes")
        vals.append(np.sqrt(1.0 - phi * phi) * e1 / e0)
    return IfCurve.from_values(cw_grid, vals)


def ls_influence_function_ar1(phi: float, cw_grid: Sequence[float]) -> IfCurve:
    """Least-squares reference ``-phi (1 - phi**2) c_w**2`` (``psi_tau(x) = x``)."""
    c = np.asarray(cw_grid, dtype=float)
    return IfCurve.from_values(c, -phi * (1.0 - phi * phi) * c * c)


def _tau_ar1(y, family):
    def f(z):
        r = K.arma_resid(y, np.array([z]), np.zeros(0), 0.0)
        return K.tau_scale_k(r, family.c1, family.b1, family.rho_kind,
                             TIGHT_TOL, TIGHT_MAXIT)[0]
    return minimize_scalar(f, bounds=(-0.99, 0.99), method="bounded",
                           options={"xatol": 1e-10}).x


def empirical_influence_ar1(phi: float, cw: float, family: RhoFamily, *,
                            epsilon: float = 0.005, n: int = 100_000,
                            replicates: int = 4, seed=None) -> float:
    """Finite-epsilon derivative ``(phi_hat(eps) - phi_hat(0)) / eps``.

    Clean and contaminated series share the underlying process (common
    random numbers); outliers are independent Bernoulli positions with
    magnitude ``+-c_w``.  The estimate minimises the tau-scale of the AR(1)
    innovations directly, averaged over ``replicates`` series.
    """
    from .sim.process import generate_arma

    ss = np.random.SeedSequence(seed)
    out = []
    for child in ss.spawn(replicates):
        rng = np.random.default_rng(child)
        x = generate_arma(ArmaParams([phi]), n, seed=rng)
        mask = rng.random(n) < epsilon
        y = x.copy()
        y[mask] += cw * rng.choice([-1.0, 1.0], size=int(mask.sum()))
        out.append((_tau_ar1(y, family) - _tau_ar1(x, family)) / epsilon)
    return float(np.mean(out))


# --- model order selection ---------------------------------------------------

@dataclass(frozen=True)
class OrderSelection:
    p_hat: int
    criterion: str
    orders: np.ndarray
    sigma: np.ndarray
    ic: np.ndarray


def _penalty(criterion: str, p: np.ndarray, n: int) -> np.ndarray:
    if criterion == "AIC":
        return 2.0 * (p + 1) / n
    if criterion == "SIC":
        return np.log(n) * p / n
    return 2.0 * np.log(np.log(n)) * p / n


def select_order(y, p_max: int, criterion: str, family: RhoFamily, *,
                 mu: Optional[float] = None, **fit_options) -> OrderSelection:
    """Robust information criterion ``log(sigma_tau(p)**2) + penalty(p)``.

    A single Durbin-Levinson pass up to ``p_max`` yields the minimised
    tau-scale of every nested order.  Penalties are ``2 (p + 1) / n`` (AIC),
    ``log(n) p / n`` (SIC) and ``2 log(log n) p / n`` (HQC).
    """
    criterion = criterion.upper()
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    y = as_series(y)
    n = y.size
    if n <= 2 * p_max:
        raise ValueError("series length must exceed 2 p_max")
    tr = estimate_ar_durbin_levinson(y, p_max, family, mu=mu, **fit_options)
    sig = np.asarray(tr.sigma_star, dtype=float)
    orders = np.arange(p_max + 1)
    with np.errstate(divide="ignore"):
        ic = np.log(sig ** 2) + _penalty(criterion, orders, n)
    ic = np.where(np.isfinite(ic), ic, np.inf)
    return OrderSelection(int(np.argmin(ic)), criterion, orders, sig, ic)

"""M-scale, tau-scale and the Gaussian constants of a score family."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._kernels import m_scale_k, tau_scale_k
from .core import RhoFamily, ETA_IDENTITY, ETA_ZERO

# half-width of the integration range; the Gaussian mass beyond is < 1e-32
_LIMIT = 12.0
# internal tolerance used by estimators that difference the scale numerically
TIGHT_TOL = 1e-13
TIGHT_MAXIT = 500


class ScaleValue(NamedTuple):
    sigma: float
    degenerate: bool = False
    iterations: int = 0


@lru_cache(maxsize=None)
def _legendre(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def expect_normal(f: Callable, knots: Sequence[float] = (), nodes: int = 200,
                  loc: float = 0.0) -> float:
    """``E[f(Z + loc)]`` for standard normal ``Z``.

    Piecewise Gauss-Legendre on ``[-12, 12]`` split at ``knots`` (given in
    the argument of ``f``), so piecewise-polynomial integrands converge at
    the rate of the smooth Gaussian factor.
    """
    pts = {-_LIMIT, _LIMIT}
    for k in knots:
        z = k - loc
        if -_LIMIT < z < _LIMIT:
            pts.add(z)
    pts = np.array(sorted(pts))
    x0, w0 = _legendre(nodes)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        half = 0.5 * (hi - lo)
        z = lo + half * (x0 + 1.0)
        dens = np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)
        total += half * np.sum(w0 * dens * f(z + loc))
    return float(total)


def _sym(knots):
    return tuple(s * k for k in knots for s in (-1.0, 1.0))


def b_constant(family: RhoFamily, which: str = "rho1", nodes: int = 200) -> float:
    """Consistency constant ``E[rho(Z)]`` for ``rho1`` or ``rho2``."""
    if which not in ("rho1", "rho2"):
        raise ValueError("which must be 'rho1' or 'rho2'")
    f = family.rho1 if which == "rho1" else family.rho2
    return expect_normal(f, _sym(family.knots), nodes)


def kappa_squared(family: RhoFamily, nodes: int = 200) -> float:
    """``E[eta(Z)**2]`` for standard normal ``Z``."""
    if family.eta_kind == ETA_IDENTITY:
        return 1.0
    if family.eta_kind == ETA_ZERO:
        return 0.0
    return expect_normal(lambda z: family.eta(z) ** 2, _sym((2.0, 3.0)), nodes)


def _check(residuals) -> np.ndarray:
    r = np.ascontiguousarray(residuals, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("residuals must be a non-empty vector")
    if np.isnan(r).any():
        raise ValueError("residuals contain NaN")
    return r


def m_scale(residuals, family: RhoFamily, tol: float = 1e-8,
            maxit: int = 100) -> ScaleValue:
    """M-scale solving ``mean(rho1(r / s)) = b1`` by fixed-point iteration.

    Starts at the normalized median absolute residual and falls back to the
    mean absolute residual when that is zero.

    Returns
    -------
    ScaleValue
        ``degenerate`` is set when every residual is zero.
    """
    r = _check(residuals)
    s, it = m_scale_k(r, family.c1, family.b1, family.rho_kind, tol, maxit)
    return ScaleValue(float(s), s == 0.0, int(it))


def tau_scale(residuals, family: RhoFamily, tol: float = 1e-8,
              maxit: int = 100) -> ScaleValue:
    """tau-scale ``s_M * sqrt(mean(rho2(r / s_M)))`` with ``s_M`` the M-scale."""
    r = _check(residuals)
    t, s = tau_scale_k(r, family.c1, family.b1, family.rho_kind, tol, maxit)
    return ScaleValue(float(t), s == 0.0)


def tau_scale_value(r: np.ndarray, family: RhoFamily) -> float:
    """Tightly converged tau-scale as a plain float (estimator hot path)."""
    return tau_scale_k(r, family.c1, family.b1, family.rho_kind,
                       TIGHT_TOL, TIGHT_MAXIT)[0]

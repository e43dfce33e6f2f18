"""BIP tau-estimation of ARMA(p, q) models.

The estimate is found in three stages:

1. a robust AR(p_long) fit whose BIP model cleans the observations,
2. a classical ARMA fit on the cleaned series as starting point,
3. damped least-squares minimisation of the tau-scale of the ARMA and of the
   BIP innovations, keeping the branch with the smaller scale.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from . import _kernels as K
from .ar import FIT_WINDOW, GRID_STEP, estimate_ar_durbin_levinson, m_location
from .core import (Q_LONG, ZETA_MARGIN, ArmaParams, ArmaSpec, Branch,
                   RhoFamily, as_series, bip_wins, roots_within_margin,
                   shrink_roots)
from .innovations import bip_clean, series_scale
from .scale import TIGHT_MAXIT, TIGHT_TOL


@dataclass(frozen=True)
class EstimationOptions:
    """Tuning of :func:`estimate_bip_tau`.

    ``mu`` fixes the location when known; otherwise it is estimated.
    ``classical`` selects the non-robust fit applied to the cleaned series
    for the starting point: ``"css"`` (conditional least squares started
    from Hannan-Rissanen) or ``"hr"`` (Hannan-Rissanen only).
    ``fit_window`` is forwarded to the AR grid search; ``None`` fits the whole
    scale curve.
    """

    q_long: int = Q_LONG
    p_long: Optional[int] = None
    grid_step: float = GRID_STEP
    max_iter: int = 200
    tol: float = 1e-8
    zeta_margin: float = ZETA_MARGIN
    mu: Optional[float] = None
    classical: str = "css"
    fit_window: Optional[int] = FIT_WINDOW


@dataclass(frozen=True)
class EstimationResult:
    beta_star: ArmaParams
    sigma_tau_star: float
    branch: Branch
    beta_arma: ArmaParams
    beta_bip: ArmaParams
    sigma_arma: float
    sigma_bip: float
    start_point: ArmaParams
    iterations: int
    converged: bool
    sigma_hat: float = float("nan")


@dataclass
class LmTrace:
    objective: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


# --- classical fitters ------------------------------------------------------

def _lagmat(z, lags, start):
    return np.column_stack([z[start - i:z.size - i] for i in range(1, lags + 1)])


def hannan_rissanen(y, p: int, q: int, mu: Optional[float] = None,
                    long_order: Optional[int] = None) -> ArmaParams:
    """Two-stage long-AR regression estimate of an ARMA(p, q) model.

    Parameters
    ----------
    y : array_like
    p, q : int
    mu : float, optional
        Location removed before fitting, sample mean by default.
    long_order : int, optional
        Order of the preliminary AR fit.
    """
    y = as_series(y)
    n = y.size
    mu = float(np.mean(y)) if mu is None else float(mu)
    z = y - mu
    if p + q == 0:
        return ArmaParams((), (), mu)
    if q == 0:
        X = _lagmat(z, p, p)
        coef = np.linalg.lstsq(X, z[p:], rcond=None)[0]
        return ArmaParams(coef, (), mu)
    L = long_order or max(2 * (p + q), int(10 * np.log10(n)))
    L = min(L, n // 4)
    if L < 1 or n - L - max(p, q) < p + q + 1:
        raise ValueError("series too short for a Hannan-Rissanen fit")
    Xl = _lagmat(z, L, L)
    ar = np.linalg.lstsq(Xl, z[L:], rcond=None)[0]
    e = np.zeros(n)
    e[L:] = z[L:] - Xl @ ar
    start = L + max(p, q)
    cols = []
    if p:
        cols.append(_lagmat(z, p, start))
    cols.append(_lagmat(e, q, start))
    coef = np.linalg.lstsq(np.hstack(cols), z[start:], rcond=None)[0]
    return ArmaParams(coef[:p], -coef[p:], mu)


def _inside(params, margin):
    return roots_within_margin(params, margin)


def project_inside(params: ArmaParams, zeta_margin: float = ZETA_MARGIN) -> ArmaParams:
    """Shrink offending roots to modulus ``1 + 2 zeta_margin``."""
    if _inside(params, zeta_margin):
        return params
    mod = 1.0 + 2.0 * zeta_margin
    return ArmaParams(shrink_roots(params.phi, mod), shrink_roots(params.theta, mod),
                      params.mu)


def css_fit(y, p: int, q: int, start: Optional[ArmaParams] = None,
            fit_mu: bool = True, zeta_margin: float = ZETA_MARGIN) -> ArmaParams:
    """Conditional least-squares ARMA fit (Gaussian likelihood conditional on
    zero pre-sample innovations)."""
    y = np.ascontiguousarray(as_series(y))
    if start is None:
        start = project_inside(hannan_rissanen(y, p, q), zeta_margin)
    mu0 = start.mu

    def resid(b):
        mu = b[p + q] if fit_mu else mu0
        r = K.arma_resid(y, b[:p], b[p:p + q], mu)
        if not np.all(np.isfinite(r)):
            return np.full(r.size, 1e150)
        return r

    x0 = start.to_vector() if fit_mu else start.to_vector()[:-1]
    if x0.size == 0:
        return start
    sol = least_squares(resid, x0, method="lm", xtol=1e-10, ftol=1e-10)
    b = sol.x
    fit = ArmaParams(b[:p], b[p:p + q], b[p + q] if fit_mu else mu0)
    return project_inside(fit, zeta_margin)


# --- starting point -----------------------------------------------------------

def default_p_long(spec: ArmaSpec) -> int:
    return 2 * (spec.p + spec.q)


@dataclass(frozen=True)
class StartInfo:
    params: ArmaParams
    ar_params: ArmaParams
    sigma_hat: float
    cleaned: np.ndarray
    projected: bool
    fallback: bool


def robust_starting_point(y, spec: ArmaSpec, family: RhoFamily,
                          p_long: Optional[int] = None, *,
                          options: EstimationOptions = EstimationOptions(),
                          info: bool = False):
    """Robust starting point from BIP cleaning with a long AR model.

    Parameters
    ----------
    y : array_like
    spec : ArmaSpec
    family : RhoFamily
    p_long : int, optional
        Order of the cleaning AR model, ``2 (p + q)`` by default.
    info : bool
        Return a :class:`StartInfo` with intermediate results instead of the
        parameters alone.
    """
    y = as_series(y)
    p, q = spec.p, spec.q
    p_long = p_long or options.p_long or default_p_long(spec)
    if y.size <= 2 * p_long + p + q + 2:
        raise ValueError("series too short for the starting-point fit")
    mu = options.mu if options.mu is not None else m_location(y, family)
    tr = estimate_ar_durbin_levinson(y, p_long, family, options.grid_step,
                                     q_long=options.q_long, mu=mu,
                                     fit_window=options.fit_window)
    ar_params = tr.params
    cleaned = bip_clean(y, ar_params, tr.sigma_hat, family, check=False) \
        if tr.sigma_hat > 0 else y.copy()
    fallback = False
    try:
        if options.classical == "css":
            start = css_fit(cleaned, p, q,
                            project_inside(hannan_rissanen(cleaned, p, q, mu), options.zeta_margin),
                            fit_mu=options.mu is None, zeta_margin=options.zeta_margin)
            if options.mu is not None:
                start = start.with_mu(mu)
        else:
            start = hannan_rissanen(cleaned, p, q, mu)
        if not np.all(np.isfinite(start.to_vector())):
            raise np.linalg.LinAlgError("non-finite classical fit")
    except np.linalg.LinAlgError:
        # AR-only projection of the long AR fit
        start = ArmaParams(ar_params.phi[:p] if p else (), np.zeros(q), mu)
        fallback = True
    projected = not _inside(start, options.zeta_margin)
    start = project_inside(start, options.zeta_margin)
    if info:
        return StartInfo(start, ar_params, tr.sigma_hat, cleaned, projected, fallback)
    return start


# --- tau objective minimisation ----------------------------------------------

class _Objective:
    """Pseudo-residuals of one branch as a function of the free parameters."""

    def __init__(self, y, p, q, branch, family, q_long, mu_fixed, sigma_y):
        self.y = np.ascontiguousarray(y)
        self.p, self.q = p, q
        self.branch = Branch(branch)
        self.family = family
        self.q_long = q_long
        self.mu_fixed = mu_fixed
        self.sigma_y = sigma_y

    def params(self, b) -> ArmaParams:
        p, q = self.p, self.q
        mu = self.mu_fixed if self.mu_fixed is not None else b[p + q]
        return ArmaParams(b[:p], b[p:p + q], mu)

    def vector(self, params: ArmaParams) -> np.ndarray:
        v = params.to_vector()
        return v if self.mu_fixed is None else v[:-1]

    def sigma_hat(self, phi, theta) -> float:
        if phi.size + theta.size == 0:
            return self.sigma_y
        lam = K.ma_inf(phi, theta, self.q_long)
        return self.sigma_y / np.sqrt(1.0 + self.family.kappa2 * np.dot(lam, lam))

    def residuals(self, b) -> np.ndarray:
        p, q = self.p, self.q
        phi = np.ascontiguousarray(b[:p])
        theta = np.ascontiguousarray(b[p:p + q])
        mu = self.mu_fixed if self.mu_fixed is not None else b[p + q]
        if self.branch is Branch.ARMA:
            return K.arma_resid(self.y, phi, theta, mu)
        sig = self.sigma_hat(phi, theta)
        if sig <= 0:
            return K.arma_resid(self.y, phi, theta, mu)
        return K.bip_resid(self.y, phi, theta, mu, sig, self.family.eta_kind)

    def pseudo(self, b) -> np.ndarray:
        f = self.family
        return K.tau_pseudo(self.residuals(b), f.c1, f.b1, f.rho_kind,
                            TIGHT_TOL, TIGHT_MAXIT)

    def tau(self, b) -> float:
        f = self.family
        return K.tau_scale_k(self.residuals(b), f.c1, f.b1, f.rho_kind,
                             TIGHT_TOL, TIGHT_MAXIT)[0]


def _marquardt(obj: _Objective, b0, options: EstimationOptions):
    margin = options.zeta_margin
    inside = lambda b: _inside(obj.params(b), margin)
    b = np.asarray(b0, dtype=float).copy()
    e = obj.pseudo(b)
    cost = float(e @ e)
    trace = LmTrace([0.5 * cost])
    lam = 1e-3
    k = b.size
    for it in range(1, options.max_iter + 1):
        trace.iterations = it
        J = np.empty((e.size, k))
        for i in range(k):
            h = 1e-6 * max(1.0, abs(b[i]))
            bp = b.copy()
            bp[i] += h
            if not inside(bp):
                bp[i] = b[i] - h
                h = -h
            J[:, i] = (obj.pseudo(bp) - e) / h
        g = J.T @ e
        A = J.T @ J
        d = np.maximum(np.diag(A), 1e-12 * max(np.diag(A).max(), 1e-300))
        accepted = False
        while lam <= 1e12:
            try:
                step = np.linalg.solve(A + lam * np.diag(d), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            bn = b + step
            if inside(bn):
                en = obj.pseudo(bn)
                cn = float(en @ en)
                if cn < cost:
                    accepted = True
                    break
            lam *= 10.0
        if not accepted:
            trace.converged = True
            break
        rel = (cost - cn) / max(cost, 1e-300)
        small = np.linalg.norm(step) <= options.tol * (np.linalg.norm(b) + options.tol)
        b, e, cost = bn, en, cn
        trace.objective.append(0.5 * cost)
        lam = max(lam / 10.0, 1e-12)
        if rel <= options.tol or small:
            trace.converged = True
            break
    return b, trace


def minimize_tau_objective(y, start: ArmaParams, branch: Branch | str,
                           family: RhoFamily,
                           options: EstimationOptions = EstimationOptions(), *,
                           sigma_y: Optional[float] = None):
    """Minimise the squared tau-scale of one branch's innovations.

    Levenberg-Marquardt on pseudo-residuals whose sum of squares is twice the
    squared tau-scale; forward-difference Jacobian, steps leaving the
    stationary/invertible set are rejected.

    Returns
    -------
    params : ArmaParams
    sigma : float
        tau-scale of the innovations at ``params``.
    trace : LmTrace
        Objective values of the accepted iterates.
    """
    y = as_series(y)
    if not _inside(start, options.zeta_margin):
        raise ValueError("starting point outside the stationary/invertible set")
    if sigma_y is None:
        sigma_y = series_scale(y, start.mu if options.mu is None else options.mu, family)
    obj = _Objective(y, start.p, start.q, branch, family, options.q_long,
                     options.mu, sigma_y)
    b0 = obj.vector(start if options.mu is None else start.with_mu(options.mu))
    if b0.size == 0:
        return obj.params(b0), obj.tau(b0), LmTrace([obj.tau(b0) ** 2], 0, True)
    b, trace = _marquardt(obj, b0, options)
    return obj.params(b), float(obj.tau(b)), trace


def estimate_bip_tau(y, spec: ArmaSpec, family: RhoFamily,
                     options: EstimationOptions = EstimationOptions()) -> EstimationResult:
    """BIP tau-estimate of an ARMA(p, q) model.

    Pure AR models are fitted by the robust Durbin-Levinson recursion;
    otherwise both branch objectives are minimised from the robust starting
    point and the branch with the smaller tau-scale is returned (ties go to
    the ARMA branch).

    Parameters
    ----------
    y : array_like
        Observations, ``n > p + q``.
    spec : ArmaSpec
    family : RhoFamily
    options : EstimationOptions

    Returns
    -------
    EstimationResult
    """
    y = as_series(y)
    if y.size <= spec.p + spec.q:
        raise ValueError("series length must exceed p + q")
    if spec.q == 0:
        tr = estimate_ar_durbin_levinson(y, spec.p, family, options.grid_step,
                                         q_long=options.q_long, mu=options.mu,
                                         fit_window=options.fit_window)
        prm = tr.params
        br = Branch.BIP if bip_wins(tr.sigma_arma, tr.sigma_bip) else Branch.ARMA
        return EstimationResult(prm, min(tr.sigma_arma, tr.sigma_bip), br, prm, prm,
                                tr.sigma_arma, tr.sigma_bip, prm, 0, True, tr.sigma_hat)
    start = robust_starting_point(y, spec, family, options=options)
    mu0 = start.mu if options.mu is None else options.mu
    sigma_y = series_scale(y, mu0, family)
    pa, sa, ta = minimize_tau_objective(y, start, Branch.ARMA, family, options,
                                        sigma_y=sigma_y)
    pb, sb, tb = minimize_tau_objective(y, start, Branch.BIP, family, options,
                                        sigma_y=sigma_y)
    if bip_wins(sa, sb):
        best, sig, br = pb, sb, Branch.BIP
    else:
        best, sig, br = pa, sa, Branch.ARMA
    lam = K.ma_inf(best.phi, best.theta, options.q_long)
    sigma_hat = sigma_y / np.sqrt(1.0 + family.kappa2 * np.dot(lam, lam))
    return EstimationResult(best, sig, br, pa, pb, sa, sb, start,
                            ta.iterations + tb.iterations,
                            ta.converged and tb.converged, float(sigma_hat))

"""Robust AR(p) estimation by grid search over partial autocorrelations.

At each order ``m`` the new reflection coefficient ``zeta`` is scanned over a
coarse grid on ``(-1, 1)``.  For every candidate the tau-scale of the ARMA and
of the BIP innovations is evaluated, a quartic is fitted to each curve and its
minimiser located on a fine grid.  The two minimisers are compared through
their actual tau-scales and the smaller one fixes ``phi_{m,m}``; lower
coefficients follow from the Durbin-Levinson update.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels as K
from .core import (Q_LONG, ArmaParams, Branch, RhoFamily, as_series, bip_wins,
                   levinson_update)
from .scale import TIGHT_MAXIT, TIGHT_TOL

GRID_STEP = 0.05
FINE_STEP = 0.001
FIT_ORDER = 4
FIT_WINDOW = 2
GRID_EDGE = 0.99


def zeta_grid(step: float, edge: float = GRID_EDGE) -> np.ndarray:
    """``-edge : step : edge`` with the end point included only if reached."""
    if not step > 0:
        raise ValueError("grid step must be positive")
    k = int(np.floor(2 * edge / step + 1e-9)) + 1
    return np.round(-edge + step * np.arange(k), 12)


def m_location(y, family: RhoFamily, tol: float = 1e-12, maxit: int = 200) -> float:
    """M-estimate of location with ``psi2`` and the normalized MAD as scale."""
    y = as_series(y)
    mu = float(np.median(y))
    s = float(np.median(np.abs(y - mu))) / K.MAD_CONST
    if s == 0.0:
        return mu
    for _ in range(maxit):
        u = (y - mu) / s
        w = np.ones_like(u)
        big = np.abs(u) > 2.0
        w[big] = family.psi2(u[big]) / u[big]
        sw = w.sum()
        if sw <= 0:
            break
        step = float(np.dot(w, y - mu) / sw)
        mu += step
        if abs(step) <= tol * s:
            break
    return mu


def _tau(r, family):
    return K.tau_scale_k(r, family.c1, family.b1, family.rho_kind,
                         TIGHT_TOL, TIGHT_MAXIT)[0]


class _Evaluator:
    """Branch tau-scales of centred AR candidates with a cached series scale."""

    def __init__(self, yc: np.ndarray, family: RhoFamily, q_long: int):
        self.y = np.ascontiguousarray(yc)
        self.family = family
        self.q_long = q_long
        self.sigma_y = _tau(self.y, family) / np.sqrt(family.b2)
        self._zero = np.zeros(0)

    def sigma_hat(self, phi) -> float:
        if phi.size == 0:
            return self.sigma_y
        lam = K.ma_inf(phi, self._zero, self.q_long)
        return self.sigma_y / np.sqrt(1.0 + self.family.kappa2 * np.dot(lam, lam))

    def forward(self, phi):
        y, fam = self.y, self.family
        s_arma = _tau(K.arma_resid(y, phi, self._zero, 0.0), fam)
        sig = self.sigma_hat(phi)
        if sig > 0:
            s_bip = _tau(K.bip_resid(y, phi, self._zero, 0.0, sig, fam.eta_kind), fam)
        else:
            s_bip = s_arma
        return s_arma, s_bip

    def objective(self, phi, mode):
        fa, fb = self.forward(phi)
        if mode == "forward":
            return fa, fb
        ba, bb = self.backward(phi)
        return 0.5 * (fa + ba), 0.5 * (fb + bb)

    def backward(self, phi):
        y, fam = self.y, self.family
        s_arma = _tau(K.ar_bw_resid(y, phi, 0.0), fam)
        sig = self.sigma_hat(phi)
        if sig > 0 and phi.size > 0:
            s_bip = _tau(K.bip_bw_resid(y, phi, 0.0, sig, fam.eta_kind), fam)
        else:
            s_bip = s_arma
        return s_arma, s_bip


@dataclass(frozen=True)
class ScaleCurve:
    """Branch tau-scales over a grid of candidate reflection coefficients.

    ``sigma_arma`` and ``sigma_bip`` hold the forward curves; in
    forward-backward mode the backward curves are stored as well and the
    objective of each branch is the mean of both directions.
    """

    grid: np.ndarray
    sigma_arma: np.ndarray
    sigma_bip: np.ndarray
    sigma_arma_bw: Optional[np.ndarray] = None
    sigma_bip_bw: Optional[np.ndarray] = None

    def objective(self, branch: Branch | str) -> np.ndarray:
        branch = Branch(branch)
        fw = self.sigma_arma if branch is Branch.ARMA else self.sigma_bip
        bw = self.sigma_arma_bw if branch is Branch.ARMA else self.sigma_bip_bw
        return fw if bw is None else 0.5 * (fw + bw)


def _curve(ev: _Evaluator, prev, grid, mode) -> ScaleCurve:
    prev = np.asarray(prev, dtype=float)
    k = grid.size
    fa, fb = np.empty(k), np.empty(k)
    ba = bb = None
    if mode == "forward_backward":
        ba, bb = np.empty(k), np.empty(k)
    for j, z in enumerate(grid):
        phi = levinson_update(prev, z)
        fa[j], fb[j] = ev.forward(phi)
        if ba is not None:
            ba[j], bb[j] = ev.backward(phi)
    return ScaleCurve(grid, fa, fb, ba, bb)


def scale_curve_on_grid(y, m: int, prev, family: RhoFamily,
                        grid_step: float = GRID_STEP, mode: str = "forward", *,
                        mu: Optional[float] = None, q_long: int = Q_LONG,
                        grid: Optional[np.ndarray] = None) -> ScaleCurve:
    """Evaluate both branch tau-scales over the reflection-coefficient grid.

    Parameters
    ----------
    y : array_like
        Observations.
    m : int
        Current order; ``prev`` must hold the ``m - 1`` coefficients of the
        previous order.
    mode : {"forward", "forward_backward"}
    mu : float, optional
        Location; the M-location of ``y`` when omitted.
    grid : ndarray, optional
        Explicit candidate values overriding ``grid_step``.
    """
    if mode not in ("forward", "forward_backward"):
        raise ValueError("mode must be 'forward' or 'forward_backward'")
    prev = np.asarray(prev, dtype=float)
    if prev.size != m - 1:
        raise ValueError("prev must hold m - 1 coefficients")
    y = as_series(y)
    if mu is None:
        mu = m_location(y, family)
    ev = _Evaluator(y - mu, family, q_long)
    g = zeta_grid(grid_step) if grid is None else np.asarray(grid, dtype=float)
    return _curve(ev, prev, g, mode)


class PolyMin(NamedTuple):
    zeta_arma: float
    zeta_bip: float
    min_arma: float
    min_bip: float
    flat: bool


def _argmin_small(grid, values):
    vmin = values.min()
    tie = np.flatnonzero(values <= vmin + 1e-12 * max(abs(vmin), 1e-300))
    j = tie[np.argmin(np.abs(grid[tie]))]
    return float(grid[j]), float(values[j])


def _fit_min(grid, values, fit_order, fine, window):
    if np.ptp(values) <= 1e-12 * max(np.abs(values).max(), 1e-300):
        return 0.0, float(values.mean()), True
    if window is not None:
        # local fit around the sampled minimum, at least fit_order + 1 points
        k = grid.size
        half = max(int(window), (fit_order + 1) // 2)
        j = int(np.argmin(values))
        lo = min(max(j - half, 0), max(k - 2 * half - 1, 0))
        hi = min(lo + 2 * half + 1, k)
        grid, values = grid[lo:hi], values[lo:hi]
        fine = fine[(fine >= grid[0] - 1e-12) & (fine <= grid[-1] + 1e-12)]
    coef = np.polynomial.polynomial.polyfit(grid, values, fit_order)
    fitted = np.polynomial.polynomial.polyval(fine, coef)
    z, v = _argmin_small(fine, fitted)
    return z, v, False


def poly_fit_minimize(curve: ScaleCurve, fit_order: int = FIT_ORDER,
                      fine_step: float = FINE_STEP,
                      window: Optional[int] = FIT_WINDOW) -> PolyMin:
    """Least-squares polynomial fit of each branch curve, minimised on a fine grid.

    Parameters
    ----------
    window : int or None
        Half-width, in grid points, of the fitting window centred on the
        sampled minimum; the fine search is restricted to the same span.
        The default of 2 fits the five nearest points.  ``None`` fits the
        whole grid; that quartic smooths the sampling noise of the curve
        but can sit several grid steps away from the sampled minimum when
        a curve steepens near ``+-1`` or has two basins.

    Ties are broken toward the smaller ``|zeta|``.  A constant curve gives
    ``zeta = 0`` with ``flat`` set.
    """
    if curve.grid.size < fit_order + 1:
        raise ValueError("curve needs at least fit_order + 1 points")
    fine = zeta_grid(fine_step)
    za, va, fa = _fit_min(curve.grid, curve.objective(Branch.ARMA), fit_order, fine, window)
    zb, vb, fb = _fit_min(curve.grid, curve.objective(Branch.BIP), fit_order, fine, window)
    return PolyMin(za, zb, va, vb, fa and fb)


def grid_minimize(curve: ScaleCurve) -> PolyMin:
    """Direct minimiser of sampled curves (exhaustive-search oracle)."""
    za, va = _argmin_small(curve.grid, curve.objective(Branch.ARMA))
    zb, vb = _argmin_small(curve.grid, curve.objective(Branch.BIP))
    return PolyMin(za, zb, va, vb, False)


@dataclass(frozen=True)
class ArFitTrace:
    """Per-order record of the recursive robust AR fit.

    Attributes
    ----------
    partials : ndarray
        Selected reflection coefficients ``phi_{m,m}``.
    branches : list of Branch
        Branch whose curve had the smaller minimum at each order.
    sigma_star : ndarray
        ``min(tau_ARMA, tau_BIP)`` at the fitted coefficients of each order.
    coeffs : list of ndarray
        AR coefficients after each order.
    """

    partials: np.ndarray
    branches: list
    sigma_star: np.ndarray
    coeffs: list
    mu: float
    sigma_arma: float
    sigma_bip: float
    sigma_hat: float
    curves: list = field(default_factory=list, repr=False)

    @property
    def phi(self) -> np.ndarray:
        return self.coeffs[-1] if self.coeffs else np.zeros(0)

    @property
    def params(self) -> ArmaParams:
        return ArmaParams(self.phi, (), self.mu)

    @property
    def branch(self) -> Branch:
        return Branch.BIP if bip_wins(self.sigma_arma, self.sigma_bip) else Branch.ARMA


def _estimate(y, p, family, grid_step, mode, fit_order, fine_step, q_long,
              mu, exhaustive, keep_curves, window=FIT_WINDOW):
    y = as_series(y)
    if p < 0:
        raise ValueError("order must be non-negative")
    if mu is None:
        mu = m_location(y, family)
    ev = _Evaluator(y - mu, family, q_long)
    grid = zeta_grid(fine_step if exhaustive else grid_step)
    phi = np.zeros(0)
    partials, branches, coeffs, curves = [], [], [], []
    # order 0: raw tau-scale of the centred series, comparable with later orders
    s0 = _tau(ev.y, family)
    sigma_star = [s0]
    s_arma = s_bip = s0
    for m in range(1, p + 1):
        curve = _curve(ev, phi, grid, mode)
        pm = grid_minimize(curve) if exhaustive else poly_fit_minimize(curve, fit_order, fine_step, window)
        # compare the branches through the tau-scales at their minimisers
        phi_a = levinson_update(phi, pm.zeta_arma)
        phi_b = levinson_update(phi, pm.zeta_bip)
        obj_a = ev.objective(phi_a, mode)[0]
        obj_b = ev.objective(phi_b, mode)[1]
        if bip_wins(obj_a, obj_b):
            z, br, phi = pm.zeta_bip, Branch.BIP, phi_b
        else:
            z, br, phi = pm.zeta_arma, Branch.ARMA, phi_a
        s_arma, s_bip = ev.forward(phi)
        partials.append(z)
        branches.append(br)
        coeffs.append(phi)
        sigma_star.append(min(s_arma, s_bip))
        if keep_curves:
            curves.append(curve)
    return ArFitTrace(np.array(partials), branches, np.array(sigma_star),
                      coeffs, float(mu), float(s_arma), float(s_bip),
                      float(ev.sigma_hat(phi)), curves)


def estimate_ar_durbin_levinson(y, p: int, family: RhoFamily,
                                grid_step: float = GRID_STEP, *,
                                fit_order: int = FIT_ORDER,
                                fine_step: float = FINE_STEP,
                                q_long: int = Q_LONG,
                                mu: Optional[float] = None,
                                exhaustive: bool = False,
                                keep_curves: bool = False,
                                fit_window: Optional[int] = FIT_WINDOW) -> ArFitTrace:
    """Robust Durbin-Levinson AR(p) fit on forward innovations.

    Parameters
    ----------
    y : array_like
        Observations, length ``n > p``.
    p : int
        AR order.
    family : RhoFamily
    grid_step : float
        Spacing of the coarse reflection-coefficient grid.
    exhaustive : bool
        Minimise the sampled tau-scale on the fine grid directly instead of
        fitting polynomials (slow reference path).
    fit_window : int, optional
        Local fitting window passed to :func:`poly_fit_minimize`.

    Returns
    -------
    ArFitTrace
        ``sigma_star[m]`` holds the scale of the order-``m`` fit, index 0
        being the scale of the centred series.
    """
    if np.size(y) <= p:
        raise ValueError("series length must exceed the AR order")
    return _estimate(y, p, family, grid_step, "forward", fit_order, fine_step,
                     q_long, mu, exhaustive, keep_curves, fit_window)


def estimate_ar_forward_backward(y, p: int, family: RhoFamily,
                                 grid_step: float = GRID_STEP, *,
                                 fit_order: int = FIT_ORDER,
                                 fine_step: float = FINE_STEP,
                                 q_long: int = Q_LONG,
                                 mu: Optional[float] = None,
                                 exhaustive: bool = False,
                                 keep_curves: bool = False,
                                fit_window: Optional[int] = FIT_WINDOW) -> ArFitTrace:
    """Robust AR(p) fit minimising the mean of forward and backward scales."""
    if np.size(y) <= 2 * p + 1:
        raise ValueError("series length must exceed 2p + 1")
    return _estimate(y, p, family, grid_step, "forward_backward", fit_order,
                     fine_step, q_long, mu, exhaustive, keep_curves, fit_window)

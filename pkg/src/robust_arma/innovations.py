"""Innovation reconstruction for the ARMA and bounded-influence (BIP) models.

The BIP recursion replaces each past innovation ``a`` fed back through the
model by ``sigma * eta(a / sigma)``, so a single outlier only disturbs the
innovations inside the clipping window.  Pre-sample innovations are zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .core import (Q_LONG, ZETA_MARGIN, ArmaParams, Branch, RhoFamily,
                   ETA_IDENTITY, ETA_PSI, as_series, ma_infinity_coeffs,
                   roots_within_margin)
from .scale import tau_scale_value


@dataclass(frozen=True)
class Residuals:
    values: np.ndarray
    branch: Branch
    sigma_used: Optional[float] = None

    def __len__(self):
        return self.values.size


def _prepare(y, params: ArmaParams, check: bool):
    y = np.ascontiguousarray(as_series(y))
    if check and not roots_within_margin(params, ZETA_MARGIN):
        raise ValueError("parameters outside the stationary/invertible set")
    if y.size <= params.p:
        raise ValueError("series shorter than the AR order")
    return y


def arma_residuals(y, params: ArmaParams, *, check: bool = True) -> Residuals:
    """Conditional ARMA innovations ``a_t`` for ``t = p+1..n``."""
    y = _prepare(y, params, check)
    a = K.arma_resid(y, params.phi, params.theta, params.mu)
    return Residuals(a, Branch.ARMA)


def bip_residuals(y, params: ArmaParams, sigma: float, family: RhoFamily, *,
                  check: bool = True) -> Residuals:
    """Innovations of the BIP-ARMA model for ``t = p+1..n``.

    With ``r = max(p, q)`` and zero-padded coefficients::

        a_t = y_t - mu - sum_i phi_i (y_{t-i} - mu)
              + sum_{i<=r} [phi_i a_{t-i} + (theta_i - phi_i) sigma eta(a_{t-i}/sigma)]
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    y = _prepare(y, params, check)
    a = K.bip_resid(y, params.phi, params.theta, params.mu, float(sigma),
                    family.eta_kind)
    return Residuals(a, Branch.BIP, float(sigma))


def ar_backward_residuals(y, params: ArmaParams, branch: Branch | str,
                          sigma: Optional[float] = None,
                          family: Optional[RhoFamily] = None, *,
                          check: bool = True) -> Residuals:
    """Backward innovations of an AR model.

    The ARMA branch returns ``n - p`` values; the BIP branch iterates downward
    from the end of the series and returns ``n - 2p - 1`` values (``n`` when
    ``p = 0``).
    """
    branch = Branch(branch)
    if params.q > 0:
        raise NotImplementedError("backward recursion is defined for AR models only")
    y = _prepare(y, params, check)
    if branch is Branch.ARMA or params.p == 0:
        a = K.ar_bw_resid(y, params.phi, params.mu)
        return Residuals(a, branch, sigma if branch is Branch.BIP else None)
    if family is None or sigma is None or not sigma > 0:
        raise ValueError("BIP branch needs a positive sigma and a family")
    a = K.bip_bw_resid(y, params.phi, params.mu, float(sigma), family.eta_kind)
    return Residuals(a, Branch.BIP, float(sigma))


def ma_denominator(params: ArmaParams, family: RhoFamily, q_long: int = Q_LONG,
                   check: bool = True) -> float:
    """``sqrt(1 + kappa2 * sum lambda_i**2)`` of the MA(infinity) expansion."""
    if params.p == 0 and params.q == 0:
        return 1.0
    lam = ma_infinity_coeffs(params, q_long, check=check)
    return float(np.sqrt(1.0 + family.kappa2 * np.dot(lam, lam)))


def series_scale(y, mu: float, family: RhoFamily) -> float:
    """Consistent tau-scale of the centred observations.

    The raw tau-scale of a standard normal sample tends to ``sqrt(b2)``, so it
    is divided by that limit to estimate the standard deviation.
    """
    tau = tau_scale_value(np.ascontiguousarray(as_series(y) - mu), family)
    return tau / np.sqrt(family.b2) if family.b2 > 0 else tau


def sigma_from_ma_infinity(y, params: ArmaParams, family: RhoFamily,
                           q_long: int = Q_LONG, *,
                           sigma_y: Optional[float] = None) -> float:
    """Innovation scale implied by the observation scale and ``beta``.

    ``sigma = tau(y - mu) / sqrt(b2 (1 + kappa2 * sum_{i<=q_long} lambda_i**2))``
    where ``lambda_i`` are the coefficients of ``theta(B)/phi(B)``.
    ``sigma_y`` may be passed to reuse a cached observation scale.
    """
    if not roots_within_margin(params, 0.0):
        raise ValueError("parameters outside the stationary/invertible set")
    if sigma_y is None:
        sigma_y = series_scale(y, params.mu, family)
    return sigma_y / ma_denominator(params, family, q_long, check=False)


def bip_clean(y, params: ArmaParams, sigma: float, family: RhoFamily, *,
              check: bool = True) -> np.ndarray:
    """Replace observations by their BIP-cleaned values.

    ``y*_t = y_t - a_t + sigma * eta(a_t / sigma)`` for ``t > p``; samples whose
    BIP innovation lies in the identity region of ``eta`` are returned
    unchanged bit for bit, as are the first ``p`` samples.
    """
    y = as_series(y)
    out = y.copy()
    if family.eta_kind == ETA_IDENTITY:
        return out
    a = bip_residuals(y, params, sigma, family, check=check).values
    z = a / sigma
    hit = np.abs(z) > 2.0 if family.eta_kind == ETA_PSI else np.ones(z.size, bool)
    idx = np.flatnonzero(hit) + params.p
    out[idx] = y[idx] - a[hit] + sigma * family.eta(z[hit])
    return out

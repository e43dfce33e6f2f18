"""Classical comparison estimators: conditional least squares on the raw
series and on a 3-sigma cleaned copy."""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..arma import css_fit, hannan_rissanen, project_inside
from ..core import ArmaParams, ArmaSpec, as_series

MADN = 1.482602218505602


class BaselineFailure(RuntimeError):
    """The baseline could not produce an estimate for this series."""


def classical_fit(y, spec: ArmaSpec, mu: Optional[float] = None) -> ArmaParams:
    """Gaussian conditional-sum-of-squares fit started from Hannan-Rissanen.

    ``mu`` fixes the location; otherwise it is estimated jointly.
    """
    y = as_series(y)
    if y.size <= spec.p + spec.q:
        raise ValueError("series length must exceed p + q")
    start = project_inside(hannan_rissanen(y, spec.p, spec.q, mu))
    fit = css_fit(y, spec.p, spec.q, start, fit_mu=mu is None)
    return fit if mu is None else fit.with_mu(mu)


def three_sigma_clean(y, max_fraction: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Flag ``|y - median| > 3 MADN`` and interpolate the flagged samples.

    Flagged values are replaced by linear interpolation between the nearest
    unflagged neighbours (nearest value at the ends).  Returns the cleaned
    copy and the flag mask.
    """
    y = as_series(y)
    med = np.median(y)
    s = MADN * np.median(np.abs(y - med))
    flag = np.abs(y - med) > 3.0 * s if s > 0 else np.zeros(y.size, bool)
    if flag.mean() > max_fraction:
        raise BaselineFailure("more than half of the samples flagged")
    out = y.copy()
    if flag.any():
        idx = np.arange(y.size)
        out[flag] = np.interp(idx[flag], idx[~flag], y[~flag])
    return out, flag


def baseline_estimators(y, spec: ArmaSpec, mu: Optional[float] = None) -> dict:
    """Both classical baselines; a failed method maps to ``None``."""
    out = {"ml": classical_fit(y, spec, mu)}
    try:
        out["ml_3sigma"] = classical_fit(three_sigma_clean(y)[0], spec, mu)
    except BaselineFailure:
        out["ml_3sigma"] = None
    return out

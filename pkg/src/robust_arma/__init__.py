"""Robust ARMA estimation with the bounded-influence-propagation tau-estimator."""
from .core import (ArmaParams, ArmaSpec, Branch, RhoFamily, make_rho_family,
                   roots_within_margin, ma_infinity_coeffs, C1_EFF, C1_ROB)
from .scale import m_scale, tau_scale, b_constant, kappa_squared, ScaleValue
from .innovations import (Residuals, arma_residuals, bip_residuals,
                          ar_backward_residuals, sigma_from_ma_infinity,
                          bip_clean)

__version__ = "0.1.0"

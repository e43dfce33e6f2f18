"""Domain types, the piecewise-polynomial score family and polynomial helpers.

Sign convention used throughout the package::

    phi(B)   = 1 - phi_1 B - ... - phi_p B^p
    theta(B) = 1 - theta_1 B - ... - theta_q B^q

so an AR(1) with ``phi = (0.5,)`` has ``y_t = 0.5 y_{t-1} + a_t``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

ZETA_MARGIN = 0.01
Q_LONG = 100
C1_EFF = 0.405
C1_ROB = 0.81

# rho2 kinds
RHO_OPTIMAL = 0
RHO_QUADRATIC = 1
# eta kinds
ETA_PSI = 0
ETA_IDENTITY = 1
ETA_ZERO = 2

RHO_SUP = 3.25
# relative gap below which the two branch scales count as tied
TIE_RTOL = 1e-12


class Branch(str, Enum):
    ARMA = "ARMA"
    BIP = "BIP"


@dataclass(frozen=True)
class ArmaSpec:
    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("orders must be non-negative")


@dataclass(frozen=True)
class ArmaParams:
    """Parameter vector ``beta = (phi, theta, mu)``."""

    phi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mu: float = 0.0

    def __post_init__(self):
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float)).copy()
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        phi.flags.writeable = False
        theta.flags.writeable = False
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def p(self) -> int:
        return self.phi.size

    @property
    def q(self) -> int:
        return self.theta.size

    @property
    def spec(self) -> ArmaSpec:
        return ArmaSpec(self.p, self.q)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.phi, self.theta, [self.mu]])

    @classmethod
    def from_vector(cls, beta, p: int, q: int) -> "ArmaParams":
        beta = np.asarray(beta, dtype=float)
        return cls(beta[:p], beta[p:p + q], beta[p + q])

    def with_mu(self, mu: float) -> "ArmaParams":
        return dataclasses.replace(self, mu=mu)

    def __eq__(self, other):
        if not isinstance(other, ArmaParams):
            return NotImplemented
        return (np.array_equal(self.phi, other.phi)
                and np.array_equal(self.theta, other.theta)
                and self.mu == other.mu)

    def __hash__(self):
        return hash((self.phi.tobytes(), self.theta.tobytes(), self.mu))


def as_series(y) -> np.ndarray:
    """Validate an observation vector and return it as a float array."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    return y


# --- score functions -------------------------------------------------------

def _rho_opt(x):
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    x2 = x * x
    mid = ((((0.002 * x2 - 0.052) * x2 + 0.432) * x2 - 0.972) * x2 + 1.792)
    # the octic overshoots RHO_SUP by rounding near |x| = 3
    return np.where(a <= 2.0, 0.5 * x2, np.where(a <= 3.0, np.minimum(mid, RHO_SUP), RHO_SUP))


def _psi_opt(x):
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    x2 = x * x
    mid = x * (((0.016 * x2 - 0.312) * x2 + 1.728) * x2 - 1.944)
    return np.where(a <= 2.0, x, np.where(a <= 3.0, mid, 0.0))


def _dpsi_opt(x):
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    x2 = x * x
    mid = ((0.112 * x2 - 1.56) * x2 + 5.184) * x2 - 1.944
    return np.where(a <= 2.0, 1.0, np.where(a <= 3.0, mid, 0.0))


@dataclass(frozen=True)
class RhoFamily:
    """Bundle of the score functions used by the tau-estimator.

    ``rho1(x) = rho2(x / c1)`` drives the M-scale, ``rho2`` the tau-scale and
    ``eta`` clips innovations in the bounded-influence recursion.  Use
    :func:`make_rho_family` to obtain an instance with its constants filled.

    Attributes
    ----------
    c1 : float
        Scaling of ``rho1`` relative to ``rho2``.
    rho_kind : int
        ``RHO_OPTIMAL`` (piecewise octic) or ``RHO_QUADRATIC`` (``x**2/2``).
    eta_kind : int
        ``ETA_PSI`` (``eta = psi2``), ``ETA_IDENTITY`` or ``ETA_ZERO``.
    b1, b2 : float
        Gaussian expectations of ``rho1`` and ``rho2``.
    kappa2 : float
        Gaussian second moment of ``eta``.
    """

    c1: float = C1_EFF
    rho_kind: int = RHO_OPTIMAL
    eta_kind: int = ETA_PSI
    b1: float = float("nan")
    b2: float = float("nan")
    kappa2: float = float("nan")

    @property
    def knots(self) -> tuple[float, ...]:
        """Break points of the rho functions (positive side)."""
        if self.rho_kind == RHO_QUADRATIC:
            return ()
        return (2.0, 3.0, 2.0 * self.c1, 3.0 * self.c1)

    @property
    def b(self) -> float:
        return self.b1

    def rho2(self, x):
        if self.rho_kind == RHO_QUADRATIC:
            x = np.asarray(x, dtype=float)
            return 0.5 * x * x
        return _rho_opt(x)

    def psi2(self, x):
        if self.rho_kind == RHO_QUADRATIC:
            return np.asarray(x, dtype=float) * 1.0
        return _psi_opt(x)

    def dpsi2(self, x):
        if self.rho_kind == RHO_QUADRATIC:
            return np.ones_like(np.asarray(x, dtype=float))
        return _dpsi_opt(x)

    def rho1(self, x):
        return self.rho2(np.asarray(x, dtype=float) / self.c1)

    def psi1(self, x):
        return self.psi2(np.asarray(x, dtype=float) / self.c1) / self.c1

    def dpsi1(self, x):
        return self.dpsi2(np.asarray(x, dtype=float) / self.c1) / self.c1 ** 2

    def eta(self, x):
        x = np.asarray(x, dtype=float)
        if self.eta_kind == ETA_IDENTITY:
            return x * 1.0
        if self.eta_kind == ETA_ZERO:
            return np.zeros_like(x)
        return _psi_opt(x)


def bip_wins(sigma_arma: float, sigma_bip: float, rtol: float = TIE_RTOL) -> bool:
    """True when the BIP scale is smaller beyond rounding; ties go to ARMA."""
    return sigma_bip < sigma_arma - rtol * abs(sigma_arma)


def make_rho_family(c1: float = C1_EFF, *, rho_kind: int = RHO_OPTIMAL,
                    eta_kind: int = ETA_PSI) -> RhoFamily:
    """Build a score family and compute its Gaussian constants.

    Parameters
    ----------
    c1 : float
        Positive tuning constant; 0.405 gives a 50% breakdown M-scale.
    rho_kind, eta_kind : int
        Non-default members exist for testing (least-squares and ARMA limits).

    Returns
    -------
    RhoFamily
    """
    if not np.isfinite(c1) or c1 <= 0:
        raise ValueError("c1 must be a positive real")
    from .scale import b_constant, kappa_squared

    fam = RhoFamily(float(c1), rho_kind, eta_kind)
    return dataclasses.replace(fam, b1=b_constant(fam, "rho1"),
                               b2=b_constant(fam, "rho2"),
                               kappa2=kappa_squared(fam))


# --- polynomial algebra ----------------------------------------------------

def inverse_roots(coef) -> np.ndarray:
    """Inverse roots of ``1 - c_1 B - ... - c_k B^k``.

    These are the eigenvalues of the companion matrix; a root ``z`` of the
    lag polynomial corresponds to the inverse root ``1/z``.
    """
    coef = np.asarray(coef, dtype=float)
    if coef.size == 0:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((coef.size, coef.size))
    comp[0] = coef
    comp[np.arange(1, coef.size), np.arange(coef.size - 1)] = 1.0
    return np.linalg.eigvals(comp)


def min_root_modulus(coef) -> float:
    """Smallest root modulus of ``1 - sum c_i B^i`` (inf when constant)."""
    r = np.abs(inverse_roots(coef))
    if r.size == 0 or r.max() == 0.0:
        return np.inf
    return 1.0 / r.max()


def roots_within_margin(params: ArmaParams, zeta_margin: float = ZETA_MARGIN) -> bool:
    """True if all AR and MA roots have modulus at least ``1 + zeta_margin``."""
    if zeta_margin < 0:
        raise ValueError("zeta_margin must be non-negative")
    bound = 1.0 + zeta_margin
    return bool(min_root_modulus(params.phi) >= bound
                and min_root_modulus(params.theta) >= bound)


def shrink_roots(coef, modulus: float) -> np.ndarray:
    """Move roots of ``1 - sum c_i B^i`` with ``|z| < modulus`` radially out
    to ``modulus`` and return the rebuilt coefficients."""
    coef = np.asarray(coef, dtype=float)
    if coef.size == 0:
        return coef.copy()
    inv = inverse_roots(coef)
    lim = 1.0 / modulus
    big = np.abs(inv) > lim
    if not big.any():
        return coef.copy()
    inv[big] *= lim / np.abs(inv[big])
    # prod (1 - r_i B) expanded in powers of B
    poly = np.real(np.poly(inv))
    return -poly[1:]


def ma_infinity_coeffs(params: ArmaParams, q_long: int = Q_LONG, *,
                       check: bool = True) -> np.ndarray:
    """Coefficients ``lambda_1..lambda_q_long`` of ``theta(B) / phi(B)``.

    Parameters
    ----------
    params : ArmaParams
    q_long : int
        Truncation length.
    check : bool
        Require ``params`` to lie inside the stationarity/invertibility set.

    Returns
    -------
    numpy.ndarray
        Array of length ``q_long`` (the leading 1 is omitted).
    """
    if q_long < 1:
        raise ValueError("q_long must be positive")
    if check and not roots_within_margin(params, 0.0):
        raise ValueError("parameters outside the stationary/invertible set")
    from ._kernels import ma_inf
    return ma_inf(params.phi, params.theta, int(q_long))


def psi_weights(params: ArmaParams, n_terms: int) -> np.ndarray:
    """Causal MA(infinity) weights of the process, leading 1 included."""
    return np.concatenate([[1.0], ma_infinity_coeffs(params, n_terms)])


def process_std(params: ArmaParams, sigma: float = 1.0, n_terms: int = 20000) -> float:
    """Theoretical standard deviation of the stationary process."""
    w = psi_weights(params, n_terms)
    return float(sigma * np.sqrt(np.sum(w * w)))


def levinson_update(prev: np.ndarray, zeta: float) -> np.ndarray:
    """One Durbin-Levinson step from order ``m-1`` to ``m``."""
    prev = np.asarray(prev, dtype=float)
    return np.concatenate([prev - zeta * prev[::-1], [zeta]])


def partials_to_coeffs(partials: Sequence[float]) -> np.ndarray:
    """Map partial autocorrelations to AR coefficients."""
    phi = np.zeros(0)
    for z in partials:
        phi = levinson_update(phi, float(z))
    return phi

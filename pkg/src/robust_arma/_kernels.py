"""Compiled inner loops shared by the scale, innovations and ar modules."""
import numpy as np
from numba import njit

MAD_CONST = 0.6744897501960817


@njit(cache=True)
def rho2_s(x, kind):
    if kind == 1:
        return 0.5 * x * x
    a = abs(x)
    if a <= 2.0:
        return 0.5 * x * x
    if a <= 3.0:
        x2 = x * x
        # clamp the rounding overshoot of the octic near |x| = 3
        return min((((0.002 * x2 - 0.052) * x2 + 0.432) * x2 - 0.972) * x2 + 1.792, 3.25)
    return 3.25


@njit(cache=True)
def psi2_s(x, kind):
    if kind == 1:
        return x
    a = abs(x)
    if a <= 2.0:
        return x
    if a <= 3.0:
        x2 = x * x
        return x * (((0.016 * x2 - 0.312) * x2 + 1.728) * x2 - 1.944)
    return 0.0


@njit(cache=True)
def eta_s(x, kind):
    if kind == 1:
        return x
    if kind == 2:
        return 0.0
    return psi2_s(x, 0)


@njit(cache=True)
def m_scale_k(r, c1, b1, kind, tol, maxit):
    """Fixed-point M-scale; returns (sigma, iterations)."""
    m = r.size
    absr = np.abs(r)
    s = np.median(absr) / MAD_CONST
    if s == 0.0:
        s = np.mean(absr)
        if s == 0.0:
            return 0.0, 0
    it = 0
    for it in range(1, maxit + 1):
        acc = 0.0
        for i in range(m):
            acc += rho2_s(r[i] / (s * c1), kind)
        s_new = s * np.sqrt(acc / m / b1)
        done = abs(s_new - s) <= tol * s
        s = s_new
        if done:
            break
    return s, it


@njit(cache=True)
def tau_scale_k(r, c1, b1, kind, tol, maxit):
    """tau-scale ``s_M * sqrt(mean rho2(r / s_M))``; returns (tau, s_M)."""
    s, _ = m_scale_k(r, c1, b1, kind, tol, maxit)
    if s == 0.0:
        return 0.0, 0.0
    acc = 0.0
    for i in range(r.size):
        acc += rho2_s(r[i] / s, kind)
    return s * np.sqrt(acc / r.size), s


@njit(cache=True)
def ma_inf(phi, theta, L):
    p = phi.size
    q = theta.size
    lam = np.zeros(L + 1)
    lam[0] = 1.0
    for j in range(1, L + 1):
        v = -theta[j - 1] if j <= q else 0.0
        for i in range(1, min(j, p) + 1):
            v += phi[i - 1] * lam[j - i]
        lam[j] = v
    return lam[1:]


@njit(cache=True)
def arma_resid(y, phi, theta, mu):
    """Conditional ARMA innovations for t = p+1..n, zero pre-sample values."""
    n = y.size
    p = phi.size
    q = theta.size
    a = np.zeros(n)
    for t in range(p, n):
        v = y[t] - mu
        for i in range(1, p + 1):
            v -= phi[i - 1] * (y[t - i] - mu)
        for i in range(1, q + 1):
            if t - i >= p:
                v += theta[i - 1] * a[t - i]
        a[t] = v
    return a[p:]


@njit(cache=True)
def bip_resid(y, phi, theta, mu, sigma, eta_kind):
    """Innovations of the bounded-influence recursion for t = p+1..n."""
    n = y.size
    p = phi.size
    q = theta.size
    r = max(p, q)
    a = np.zeros(n)
    for t in range(p, n):
        v = y[t] - mu
        for i in range(1, p + 1):
            v -= phi[i - 1] * (y[t - i] - mu)
        for i in range(1, r + 1):
            if t - i < p:
                break
            ph = phi[i - 1] if i <= p else 0.0
            th = theta[i - 1] if i <= q else 0.0
            prev = a[t - i]
            v += ph * prev + (th - ph) * sigma * eta_s(prev / sigma, eta_kind)
        a[t] = v
    return a[p:]


@njit(cache=True)
def ar_bw_resid(y, phi, mu):
    """Backward AR residuals ``y_s - mu - sum phi_i (y_{s+i} - mu)``."""
    n = y.size
    p = phi.size
    out = np.empty(n - p)
    for s in range(n - p):
        v = y[s] - mu
        for i in range(1, p + 1):
            v -= phi[i - 1] * (y[s + i] - mu)
        out[s] = v
    return out


@njit(cache=True)
def bip_bw_resid(y, phi, mu, sigma, eta_kind):
    """Backward bounded-influence AR residuals, iterated downwards.

    Residual index t runs over p+1..n-p-1 (1-based); terms beyond the upper
    end of that range are zero.
    """
    n = y.size
    p = phi.size
    m = n - 2 * p - 1
    if m <= 0:
        return np.zeros(0)
    a = np.zeros(m)
    # a[k] corresponds to t = p + 1 + k, observation y_{t-p} = y[k] (0-based)
    for k in range(m - 1, -1, -1):
        v = y[k] - mu
        for i in range(1, p + 1):
            v -= phi[i - 1] * (y[k + i] - mu)
            if k + i < m:
                nxt = a[k + i]
                v += phi[i - 1] * (nxt - sigma * eta_s(nxt / sigma, eta_kind))
        a[k] = v
    return a


@njit(cache=True)
def tau_pseudo(r, c1, b1, kind, tol, maxit):
    """Pseudo-residuals ``e`` with ``sum(e**2) = 2 tau**2``.

    ``e_i = s_M sign(r_i) sqrt(2 rho2(r_i / s_M) / m)``, which equals
    ``r_i / sqrt(m)`` inside the quadratic region of ``rho2``.
    """
    m = r.size
    s, _ = m_scale_k(r, c1, b1, kind, tol, maxit)
    e = np.zeros(m)
    if s == 0.0:
        return e
    k = 1.0 / np.sqrt(m)
    for i in range(m):
        u = r[i] / s
        if abs(u) <= 2.0 or kind == 1:
            e[i] = r[i] * k
        else:
            v = s * np.sqrt(2.0 * rho2_s(u, kind)) * k
            e[i] = v if u > 0 else -v
    return e

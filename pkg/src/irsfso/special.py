"""Special functions used by the field and performance models.

The complex error function is evaluated through the Faddeeva function
``w(z) = exp(-z**2) erfc(-1j*z)`` so that products of huge exponentials and
erf values can be formed without overflow (see :func:`gauss_segment`).
"""
from __future__ import annotations

import functools
import math

import numpy as np
from scipy import integrate, special

__all__ = [
    "cerf",
    "qfunc",
    "bessel_k",
    "gamma_gamma_pdf",
    "gamma_gamma_cdf",
    "gauss_segment",
    "log_gauss_segment",
]


def _erf_parts(z):
    """Return ``(sign, w)`` with ``erf(z) = sign * (1 - exp(-z**2) * w)``.

    ``w`` is always evaluated in the closed upper half plane where the
    Faddeeva function is bounded by one.
    """
    z = np.asarray(z, dtype=complex)
    sign = np.where(z.real >= 0, 1.0, -1.0)
    return sign, special.wofz(1j * sign * z)


def cerf(z):
    """Complex error function.

    Raises ``OverflowError`` when ``exp(-z**2)`` leaves the double range
    (roughly ``|Im z| > 26`` with small ``Re z``); such arguments only occur
    scaled inside :func:`gauss_segment`.
    """
    z_arr = np.asarray(z, dtype=complex)
    sign, w = _erf_parts(z_arr)
    with np.errstate(over="ignore", invalid="ignore"):
        out = sign * (1.0 - np.exp(-z_arr * z_arr) * w)
    # exact zero of the odd function
    out = np.where(z_arr == 0, 0.0, out)
    if not np.all(np.isfinite(out)):
        raise OverflowError("cerf overflow: exp(-z**2) exceeds double range")
    return out[()] if out.ndim == 0 else out


def qfunc(x):
    """Gaussian tail probability ``Q(x) = 0.5 * erfc(x / sqrt(2))``."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def bessel_k(nu, x):
    """Modified Bessel function of the second kind ``K_nu(x)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_k requires x > 0")
    return special.kv(nu, x)


def gamma_gamma_pdf(h, alpha, beta):
    """Unit-mean Gamma-Gamma density.

    ``f(h) = 2 (a b h)^((a+b)/2) / (Gamma(a) Gamma(b) h) K_{a-b}(2 sqrt(a b h))``
    """
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("gamma_gamma_pdf is defined for h > 0")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    ab = alpha * beta
    # log-domain to keep the power and K_nu finite for large h
    z = 2.0 * np.sqrt(ab * h)
    log_f = (
        math.log(2.0)
        + 0.5 * (alpha + beta) * np.log(ab * h)
        - special.gammaln(alpha)
        - special.gammaln(beta)
        - np.log(h)
        + np.log(special.kve(alpha - beta, z))
        - z
    )
    return np.exp(log_f)


def _cdf_scalar(h, alpha, beta):
    if h == 0.0:
        return 0.0
    if math.isinf(h):
        return 1.0
    # f(h) ~ h^(min(a,b)-1) near zero: t = h^m flattens it
    m = min(alpha, beta)

    def integrand(t):
        hh = t ** (1.0 / m)
        return float(gamma_gamma_pdf(hh, alpha, beta)) * hh / (m * t)

    # integrate piecewise between decade breakpoints so no bulk is missed
    cuts = [0.0] + [c for c in (1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0) if c < h] + [h]
    parts = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if lo == 0.0:
            val, _ = integrate.quad(integrand, 0.0, hi**m, epsabs=0.0, epsrel=1e-10, limit=400)
        else:
            # the density is smooth away from zero: integrate in h itself
            val, _ = integrate.quad(lambda x: float(gamma_gamma_pdf(x, alpha, beta)), lo, hi, epsabs=0.0, epsrel=1e-10, limit=400)
        parts.append(val)
    return min(max(math.fsum(parts), 0.0), 1.0)


def _tail_scalar(h, alpha, beta):
    """Upper-tail mass ``1 - F(h)`` integrated directly in ``h``."""
    val, _ = integrate.quad(lambda x: float(gamma_gamma_pdf(x, alpha, beta)), h, np.inf, epsabs=1e-300, epsrel=1e-8, limit=200)
    return val


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _t_density(t, alpha, beta, m):
    """Density of ``t = h**m``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    hh = t[pos] ** (1.0 / m)
    out[pos] = gamma_gamma_pdf(hh, alpha, beta) * hh / (m * t[pos])
    return out


def _gl_on(lo, hi, alpha, beta, m):
    """16-point Gauss-Legendre of the ``t`` density on ``[lo, hi]`` (arrays)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[..., None] + half[..., None] * _GL_X
    return half * (_t_density(t, alpha, beta, m) @ _GL_W)


@functools.lru_cache(maxsize=32)
def _cdf_table(alpha, beta):
    """Panel edges in ``t = h**m`` and the CDF at each edge.

    Geometric panels (ratio about 1.1 from ``h = 1e-12``) make each panel integrand nearly
    polynomial; the first panel starts at zero where the ``t`` density is
    bounded.
    """
    m = min(alpha, beta)
    h_hi = 1.0
    while _tail_scalar(h_hi, alpha, beta) > 1e-15 and h_hi < 1e6:
        h_hi *= 2
    t_hi = h_hi**m
    t_lo = 1e-12**m
    edges = np.concatenate([[0.0], np.geomspace(t_lo, t_hi, int(np.log(t_hi / t_lo) / np.log(1.1)) + 2)])
    cum = np.concatenate([[0.0], np.cumsum(_gl_on(edges[:-1], edges[1:], alpha, beta, m))])
    return m, edges, cum


def gamma_gamma_cdf(h, alpha, beta, method: str = "table"):
    """Gamma-Gamma CDF of :func:`gamma_gamma_pdf`.

    ``method="table"`` cumulates composite Gauss-Legendre panels in
    ``t = h**min(alpha, beta)`` once per parameter pair and finishes each
    query with one partial panel; ``"quad"`` runs adaptive quadrature per
    value. Accepts scalars or arrays; ``numpy.inf`` maps to one.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    h_arr = np.asarray(h, dtype=float)
    if np.any(h_arr < 0) or np.any(np.isnan(h_arr)):
        raise ValueError("gamma_gamma_cdf is defined for h >= 0")
    if method == "quad":
        out = np.vectorize(lambda v: _cdf_scalar(float(v), alpha, beta), otypes=[float])(h_arr)
        return out[()] if out.ndim == 0 else out
    if method != "table":
        raise ValueError("method must be 'table' or 'quad'")
    m, edges, cum = _cdf_table(float(alpha), float(beta))
    flat = h_arr.ravel()
    out = np.ones_like(flat)
    with np.errstate(over="ignore"):
        t = flat**m
    inside = t < edges[-1]
    ti = t[inside]
    idx = np.clip(np.searchsorted(edges, ti, side="right") - 1, 0, len(edges) - 2)
    part = _gl_on(edges[idx], ti, alpha, beta, m)
    out[inside] = np.clip(cum[idx] + part, 0.0, 1.0)
    out = out.reshape(h_arr.shape)
    return out[()] if out.ndim == 0 else out


def gauss_segment(a, b, x1, x2):
    """``integral_{x1}^{x2} exp(-a x^2 - b x) dx`` for complex ``a, b``.

    Evaluated as ``sqrt(pi)/(2 sqrt(a)) exp(b^2/4a) [erf(z2) - erf(z1)]``
    with ``z = sqrt(a) x + b / (2 sqrt(a))`` but reorganised through the
    Faddeeva function so the exponentially large erf values and the
    exponentially small Gaussian prefactor never appear separately. The
    principal root with ``Re sqrt(a) > 0`` is used; ``Re a`` must be
    nonnegative and ``a`` nonzero. Broadcasts over all arguments.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = np.sqrt(a)
    u = b / (2.0 * s)
    z1 = s * x1 + u
    z2 = s * x2 + u
    g1, w1 = _erf_parts(z1)
    g2, w2 = _erf_parts(z2)
    e1 = np.exp(-a * x1 * x1 - b * x1)
    e2 = np.exp(-a * x2 * x2 - b * x2)
    inner = g1 * e1 * w1 - g2 * e2 * w2
    jump = g2 - g1
    with np.errstate(over="ignore", invalid="ignore"):
        full = np.where(jump != 0, jump * np.exp(u * u), 0.0)
    return math.sqrt(math.pi) / (2.0 * s) * (full + inner)


def log_gauss_segment(a, b, x1, x2):
    """Natural log of :func:`gauss_segment`, finite even when the integral
    itself would over- or underflow. Complex valued (branch arbitrary)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = np.sqrt(a)
    u = b / (2.0 * s)
    g1, w1 = _erf_parts(s * x1 + u)
    g2, w2 = _erf_parts(s * x2 + u)
    l1 = -a * x1 * x1 - b * x1
    l2 = -a * x2 * x2 - b * x2
    lu = u * u
    jump = g2 - g1
    m = np.maximum(l1.real, l2.real)
    m = np.where(jump != 0, np.maximum(m, lu.real), m)
    total = g1 * np.exp(l1 - m) * w1 - g2 * np.exp(l2 - m) * w2
    # exponent masked before exp so the unused branch cannot overflow
    total = total + jump * np.exp(np.where(jump != 0, lu - m, 0.0))
    with np.errstate(divide="ignore"):
        return np.log(math.sqrt(math.pi) / (2.0 * s)) + m + np.log(total)

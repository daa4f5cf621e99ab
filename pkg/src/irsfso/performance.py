"""Bit error rate, capacity and outage of OOK links sharing an IRS, under
Gamma-Gamma turbulence and inter-link interference.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .special import gamma_gamma_cdf, gamma_gamma_pdf, qfunc

__all__ = [
    "FadingParams",
    "PerfInputs",
    "McResult",
    "noise_power",
    "snr_factors",
    "sample_fading",
    "fading_stream",
    "instantaneous_ber",
    "sinr",
    "average_ber",
    "ber_noise_limited_series",
    "capacity_lower_bound",
    "threshold_sinr",
    "outage_upper_bound",
    "outage_noise_limited",
]

CHUNK = 1 << 15  # trials per independent random stream
QUAD_MAX_PAIRS = 3


@dataclass(frozen=True)
class FadingParams:
    alpha: float = 2.0
    beta: float = 2.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")


@dataclass(frozen=True)
class PerfInputs:
    """SNR factors seen by one receiver.

    ``gammas[i]`` is ``P_i |h_irs h_p|^2 / sigma_w^2`` for the link from
    source ``i`` to the receiver; ``desired`` indexes the intended source.
    ``rate`` is the target rate in bit/s (used for outage only).
    """

    gammas: tuple
    desired: int = 0
    bandwidth: float = 1e9
    rate: float | None = None

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 1 or g.size < 1 or np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ValueError("gammas must be a nonempty vector of nonnegative finite values")
        if not 0 <= self.desired < g.size:
            raise ValueError("desired index out of range")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.rate is not None and self.rate < 0:
            raise ValueError("rate must be nonnegative")
        object.__setattr__(self, "gammas", tuple(float(v) for v in g))

    @property
    def n(self) -> int:
        return len(self.gammas)

    @property
    def gamma_n(self) -> float:
        return self.gammas[self.desired]

    @property
    def interferers(self) -> tuple:
        return tuple(i for i in range(self.n) if i != self.desired)

    @property
    def gamma_thr(self) -> float:
        if self.rate is None:
            raise ValueError("rate not set")
        return threshold_sinr(self.rate, self.bandwidth)


@dataclass(frozen=True)
class McResult:
    value: float
    stderr: float
    trials: int


def noise_power(n0_dbm_per_mhz: float, bandwidth: float) -> float:
    """Noise variance in W for a density given in dBm/MHz."""
    return 10 ** (n0_dbm_per_mhz / 10) * 1e-3 * bandwidth / 1e6


def snr_factors(powers, h_irs, h_p, sigma_w2: float):
    """``gamma_i = P_i |h_irs,i h_p,i|^2 / sigma_w^2`` elementwise."""
    return np.asarray(powers, float) * (np.asarray(h_irs, float) * np.asarray(h_p, float)) ** 2 / sigma_w2


# ---------------------------------------------------------------------------
# fading


def sample_fading(params: FadingParams, rng: np.random.Generator, size=None):
    """Unit-mean Gamma-Gamma samples: product of Gamma(alpha, 1/alpha) and
    Gamma(beta, 1/beta) draws."""
    x = rng.gamma(params.alpha, 1.0 / params.alpha, size)
    y = rng.gamma(params.beta, 1.0 / params.beta, size)
    return x * y


def fading_stream(seed: int, chunk: int) -> np.random.Generator:
    """Independent generator for trial chunk ``chunk`` (counter-based), so
    results do not depend on how chunks are distributed over workers."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), int(chunk)]))


def _fading_matrix(fading, seed, chunk, size):
    rng = fading_stream(seed, chunk)
    return np.stack([sample_fading(f, rng, size) for f in fading])


def _fading_list(fading, n):
    if isinstance(fading, FadingParams):
        return [fading] * n
    fading = list(fading)
    if len(fading) != n:
        raise ValueError("one FadingParams per link required")
    return fading


# ---------------------------------------------------------------------------
# BER


def instantaneous_ber(h_a, perf: PerfInputs):
    """BER of OOK with the half-amplitude detection threshold, averaged over
    all on/off patterns of the interferers.

    ``h_a`` has shape ``(N,)`` or ``(N, ...)`` for vectorised evaluation.
    """
    h_a = np.asarray(h_a, dtype=float)
    if h_a.shape[0] != perf.n:
        raise ValueError("h_a must have one entry per link")
    sq = np.sqrt(np.asarray(perf.gammas))
    base = 0.5 * h_a[perf.desired] * sq[perf.desired]
    inter = perf.interferers
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(inter)):
        shift = 0.0
        for b, m in zip(bits, inter):
            if b:
                shift = shift + h_a[m] * sq[m]
        total = total + qfunc(base - shift) + qfunc(base + shift)
    return total / 2 ** perf.n


def sinr(h_a, perf: PerfInputs):
    h_a = np.asarray(h_a, dtype=float)
    g = np.asarray(perf.gammas)
    num = g[perf.desired] * h_a[perf.desired] ** 2
    den = 1.0
    for m in perf.interferers:
        den = den + g[m] * h_a[m] ** 2
    return num / den


def _mc(fn, perf, fading, trials, seed, workers):
    fading = _fading_list(fading, perf.n)
    n_chunks = -(-trials // CHUNK)
    sizes = [min(CHUNK, trials - c * CHUNK) for c in range(n_chunks)]

    def run(c):
        h = _fading_matrix(fading, seed, c, sizes[c])
        v = fn(h)
        return float(np.sum(v)), float(np.sum(v * v))

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, range(n_chunks)))
    else:
        parts = [run(c) for c in range(n_chunks)]
    # fixed-order reduction over chunks
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / trials
    var = max(s2 / trials - mean * mean, 0.0)
    return McResult(mean, math.sqrt(var / max(trials - 1, 1)), trials)


def _tail_point(f: FadingParams, tail=1e-9):
    """``h`` with Gamma-Gamma upper-tail mass below ``tail``."""
    hi = 10.0
    while 1.0 - gamma_gamma_cdf(hi, f.alpha, f.beta) > tail:
        hi *= 2
    return optimize.brentq(lambda h: 1.0 - gamma_gamma_cdf(h, f.alpha, f.beta) - tail, 1e-6, hi, xtol=1e-6)


def _u_grid(f: FadingParams, panels=48, order=16):
    """Gauss-Legendre nodes in ``u = sqrt(h)`` with the density folded into
    the weights."""
    u_max = math.sqrt(_tail_point(f))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, u_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * x).ravel()
    wu = (half[:, None] * w).ravel()
    h = u * u
    return h, wu * 2 * u * gamma_gamma_pdf(h, f.alpha, f.beta)


def _quad_over_interferers(perf, fading, inner):
    """Integrate ``inner(h_vec_matrix)`` (vector over interferer nodes)
    against the interferer densities on tensor grids."""
    inter = perf.interferers
    if not inter:
        return float(inner(np.zeros((perf.n, 1)))[0])
    grids = [_u_grid(fading[m]) for m in inter]
    nodes = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    weights = np.ones_like(nodes[0])
    for i, g in enumerate(grids):
        shape = [1] * len(grids)
        shape[i] = -1
        weights = weights * g[1].reshape(shape)
    h = np.zeros((perf.n, nodes[0].size))
    for m, nd in zip(inter, nodes):
        h[m] = nd.ravel()
    vals = inner(h)
    return float(np.sum(weights.ravel() * vals))


def average_ber(perf: PerfInputs, fading, method: str = "quad", trials: int = 10**6, seed: int = 0, workers: int | None = None):
    """Fading-averaged BER of the desired link.

    ``method="mc"`` returns an :class:`McResult` (mean and standard error of
    the conditional BER over ``trials`` fading draws); ``"quad"`` returns a
    float from adaptive integration over the desired gain nested in tensor
    Gauss-Legendre grids over the interferer gains (at most three links).
    """
    fading = _fading_list(fading, perf.n)
    if method == "mc":
        return _mc(lambda h: instantaneous_ber(h, perf), perf, fading, trials, seed, workers)
    if method != "quad":
        raise ValueError("method must be 'mc' or 'quad'")
    if perf.n > QUAD_MAX_PAIRS:
        raise ValueError(f"quadrature limited to N <= {QUAD_MAX_PAIRS} links")
    fd = fading[perf.desired]
    h_max = _tail_point(fd)
    n = perf.desired

    def inner(h_int):
        def integrand(x):
            # x = sqrt(h) removes the density's h^(min(a,b)-1) kink at zero
            hh = x * x
            h = h_int.copy()
            h[n] = hh
            return instantaneous_ber(h, perf) * gamma_gamma_pdf(max(hh, 1e-300), fd.alpha, fd.beta) * 2 * x

        g = perf.gamma_n
        pts = None
        if g > 0:
            # detection step near h ~ 1/sqrt(gamma): refine around it
            step = min(2.0 / math.sqrt(g), h_max)
            pts = sorted({math.sqrt(step * s) for s in (0.25, 1.0, 4.0) if step * s < h_max})
        val, _ = integrate.quad_vec(integrand, 0.0, math.sqrt(h_max), epsabs=1e-13, epsrel=1e-9, points=pts, limit=4000)
        return np.asarray(val)

    return _quad_over_interferers(perf, fading, inner)


def ber_noise_limited_series(gamma_n: float, alpha: float, beta: float, terms: int = 60):
    """Convergent series for the noise-limited average BER, expanded in
    powers of ``(4 x)^(-1/2)`` with ``x = gamma_n / 4``.

    Returns ``(value, bound)`` where ``bound`` is the magnitude of the last
    included pair of terms. Raises ``ZeroDivisionError`` when ``alpha - beta``
    is an integer (the coefficients have a pole there); use
    :func:`average_ber` instead.
    """
    d = alpha - beta
    if abs(d - round(d)) < 1e-12:
        raise ZeroDivisionError("alpha - beta is an integer: series coefficients are singular")
    if gamma_n <= 0:
        raise ValueError("gamma_n must be positive")
    x = gamma_n / 4

    def xi(a, b, i):
        # log-magnitude and sign of the coefficient
        lg = (
            0.5 * math.log(math.pi)
            + (i + b) * math.log(2 * math.sqrt(2) * a * b)
            + special.gammaln((i + b + 1) / 2)
            - math.log(2)
            - special.gammaln(a)
            - special.gammaln(b)
            - special.gammaln(i + 1)
            - math.log(i + b)
        )
        g_arg = i - a + b + 1
        rg = special.rgamma(g_arg)
        s = math.sin(math.pi * (a - b))
        return math.exp(lg) * rg / s

    total = 0.0
    last = 0.0
    for i in range(terms):
        t1 = xi(alpha, beta, i) * (4 * x) ** (-(i + beta) / 2)
        t2 = xi(beta, alpha, i) * (4 * x) ** (-(i + alpha) / 2)
        total += t1 + t2
        last = abs(t1 + t2)
    return total, last


# ---------------------------------------------------------------------------
# capacity and outage


def capacity_lower_bound(upsilon, bandwidth: float = 1e9):
    """``(W/2) ln(1 + e Upsilon / (2 pi))`` in nats/s."""
    upsilon = np.asarray(upsilon, dtype=float)
    if np.any(upsilon < 0):
        raise ValueError("SINR must be nonnegative")
    return bandwidth / 2 * np.log1p(upsilon * math.e / (2 * math.pi))


def threshold_sinr(rate: float, bandwidth: float = 1e9) -> float:
    """SINR at which :func:`capacity_lower_bound` equals ``rate``."""
    return 2 * math.pi / math.e * math.expm1(2 * rate / bandwidth)


def outage_noise_limited(perf: PerfInputs, fading) -> float:
    """Outage bound without interference: ``F(sqrt(gamma_thr / gamma_n))``."""
    f = _fading_list(fading, perf.n)[perf.desired]
    thr = perf.gamma_thr
    if thr == 0:
        return 0.0
    if perf.gamma_n == 0:
        return 1.0
    return float(gamma_gamma_cdf(math.sqrt(thr / perf.gamma_n), f.alpha, f.beta))


def outage_upper_bound(perf: PerfInputs, fading, method: str = "quad", trials: int = 10**6, seed: int = 0, workers: int | None = None):
    """Probability that the SINR falls below the rate threshold."""
    fading = _fading_list(fading, perf.n)
    thr = perf.gamma_thr
    if method == "mc":
        return _mc(lambda h: (sinr(h, perf) < thr).astype(float), perf, fading, trials, seed, workers)
    if method != "quad":
        raise ValueError("method must be 'mc' or 'quad'")
    if perf.n > QUAD_MAX_PAIRS:
        raise ValueError(f"quadrature limited to N <= {QUAD_MAX_PAIRS} links")
    if thr == 0:
        return 0.0
    if perf.gamma_n == 0:
        return 1.0
    fd = fading[perf.desired]
    g = np.asarray(perf.gammas)

    def inner(h):
        chi = thr / g[perf.desired] * (1.0 + sum(g[m] * h[m] ** 2 for m in perf.interferers))
        return gamma_gamma_cdf(np.sqrt(chi), fd.alpha, fd.beta)

    return _quad_over_interferers(perf, fading, inner)

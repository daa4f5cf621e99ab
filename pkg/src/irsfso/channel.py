"""Geometric and misalignment loss (GML) of IRS links, atmospheric loss and
end-to-end channel gain composition.

Three evaluators of the GML are provided:

* :func:`gml_out_of_plane` and :func:`gml_in_plane`, the semi-analytic
  double-sum expressions over tile pairs (square lens of equal area, tile
  aperture factor frozen at one lens point);
* :func:`gml_lens_quadrature`, direct 2D quadrature of the coherent tile
  field over the true circular lens, used as the oracle.

:func:`hf_oracle_field` integrates the Huygens-Fresnel diffraction integral
numerically and serves as the oracle of the closed-form tile field.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft, integrate

from .beam import BeamParams, RegimeError, incident_field, incident_frame
from .geometry import LinkGeometry, lens_to_irs_frame
from .irs import Tile, tile_coefficients, tile_field
from .special import gauss_segment, log_gauss_segment

__all__ = [
    "OracleMode",
    "QuadratureError",
    "hf_oracle_field",
    "gml_out_of_plane",
    "gml_in_plane",
    "gml_lens_quadrature",
    "gml_far_field",
    "atmospheric_loss",
    "AtmosphereParams",
    "ChannelGain",
    "compose_channel",
]

SAMPLES_PER_CYCLE = 8


class QuadratureError(RuntimeError):
    """A numerical integral failed to reach its tolerance."""


class OracleMode(enum.Enum):
    SEPARABLE1D = "separable1d"
    EXACT2D = "exact2d"


# ---------------------------------------------------------------------------
# diffraction-integral oracle


def _gl_panels(lo, hi, n_panels, order=16):
    """Composite Gauss-Legendre nodes and weights on ``[lo, hi]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _panels_for(rate, length, resolution):
    # rate: max phase advance per meter; ``resolution`` scales the sampling
    n_samples = SAMPLES_PER_CYCLE * rate * length / (2 * math.pi)
    # 16-point panels; 12 samples of headroom per panel for the uneven spacing
    return max(2, int(math.ceil(resolution * max(n_samples, 16) / 12)))


def _separable_factors(r_p, link: LinkGeometry, tile: Tile, beam: BeamParams, resolution):
    """Per-axis integrals of the linearised Huygens-Fresnel integrand."""
    frame = incident_frame(beam, link.ls, link.footprint_center)
    k = beam.k
    pd = link.pd
    dp = pd.d
    xp, yp = float(r_p[0]), float(r_p[1])
    # observation direction cosines linearised in the lens coordinates
    ro = lens_to_irs_frame(np.array([xp, yp, 0.0]), pd, link.lens_center)
    ro_c = lens_to_irs_frame(np.zeros(3), pd, link.lens_center)
    o_x, o_y = ro[0] / dp, ro[1] / dp
    q_x = (1 - (ro_c[0] / dp) ** 2) / (2 * dp)
    q_y = (1 - (ro_c[1] / dp) ** 2) / (2 * dp)
    fp = np.asarray(link.footprint_center, dtype=float)
    prof = tile.profile
    xt, yt = prof.center[0], prof.center[1]

    def axis(lo, hi, o, q, coord, t, p1, p2):
        tilt = math.cos(link.ls.theta) if coord == 0 else 0.0
        curv = frame.R_x if coord == 0 else frame.R_y

        def slope(s):
            # derivative of the total integrand phase along this axis
            return k * (tilt - (s - fp[coord]) / curv - o + 2 * q * s - p1 - 2 * p2 * (s - t))

        rate = max(abs(slope(lo)), abs(slope(hi)), 2 * math.pi / (hi - lo))
        n = _panels_for(rate, hi - lo, resolution)
        s, w = _gl_panels(lo, hi, n)
        pts = np.tile(fp, (s.size, 1))
        pts[:, coord] = s
        g = incident_field(pts, frame, beam, carrier=False)
        u = s - t
        phase = k * (-s * o + q * s * s - (p1 * u + p2 * u * u))
        # average phase advance per sample within each panel
        steps = np.abs(np.diff(np.unwrap(phase + np.angle(g))))
        steps = np.append(steps, 0.0).reshape(n, -1)[:, :-1]
        if np.max(np.mean(steps, axis=1)) > math.pi / 4:
            raise QuadratureError("resolution insufficient: phase step exceeds pi/4")
        return np.sum(w * g * np.exp(1j * phase))

    x_lo, x_hi = tile.center[0] - tile.lx / 2, tile.center[0] + tile.lx / 2
    y_lo, y_hi = tile.center[1] - tile.ly / 2, tile.center[1] + tile.ly / 2
    jx = axis(x_lo, x_hi, o_x, q_x, 0, xt, prof.phi_x, prof.phi_x2)
    jy = axis(y_lo, y_hi, o_y, q_y, 1, yt, prof.phi_y, prof.phi_y2)
    g0 = incident_field(fp, frame, beam, carrier=False)
    # constant phase of profile and path: d_p - d_hat - phi0 + profile offsets
    lin_const = prof.phi_x * xt - prof.phi_x2 * xt**2 + prof.phi_y * yt - prof.phi_y2 * yt**2
    path = ((dp - frame.d_hat) - prof.phi0) + lin_const
    pref = tile.zeta / (1j * beam.wavelength * dp) * np.exp(1j * k * path)
    return pref * jx * jy / g0


def _exact2d(r_p, link: LinkGeometry, tile: Tile, beam: BeamParams, resolution):
    frame = incident_frame(beam, link.ls, link.footprint_center)
    k = beam.k
    ro = lens_to_irs_frame(np.array([r_p[0], r_p[1], 0.0]), link.pd, link.lens_center)
    dist0 = float(np.linalg.norm(ro))
    x_lo, x_hi = tile.center[0] - tile.lx / 2, tile.center[0] + tile.lx / 2
    y_lo, y_hi = tile.center[1] - tile.ly / 2, tile.center[1] + tile.ly / 2
    prof = tile.profile
    fp = link.footprint_center
    cx, cy = np.meshgrid([x_lo, x_hi], [y_lo, y_hi])
    dist_c = np.sqrt((ro[0] - cx) ** 2 + (ro[1] - cy) ** 2 + ro[2] ** 2)
    # phase gradient at the tile corners (linear terms dominate the bound)
    gx = k * (math.cos(link.ls.theta) - (cx - fp[0]) / frame.R_x - (ro[0] - cx) / dist_c - prof.phi_x - 2 * prof.phi_x2 * (cx - prof.center[0]))
    gy = k * (-(cy - fp[1]) / frame.R_y - (ro[1] - cy) / dist_c - prof.phi_y - 2 * prof.phi_y2 * (cy - prof.center[1]))
    rate = float(max(np.max(np.abs(gx)), np.max(np.abs(gy)), 2 * math.pi / min(x_hi - x_lo, y_hi - y_lo)))
    nx = _panels_for(rate, x_hi - x_lo, resolution)
    ny = _panels_for(rate, y_hi - y_lo, resolution)
    if nx * ny * 256 > 5e7:
        raise QuadratureError("exact2d needs a scaled geometry: too many quadrature points")
    xs, wx = _gl_panels(x_lo, x_hi, nx)
    ys, wy = _gl_panels(y_lo, y_hi, ny)
    total = 0.0 + 0.0j
    for j in range(ys.size):
        pts = np.column_stack([xs, np.full_like(xs, ys[j]), np.zeros_like(xs)])
        g = incident_field(pts, frame, beam, carrier=False)
        r2 = xs**2 + ys[j] ** 2
        dot = xs * ro[0] + ys[j] * ro[1]
        dist = np.sqrt(dist0**2 + r2 - 2 * dot)
        # |r_o - r| - |r_o| without cancellation
        excess = (r2 - 2 * dot) / (dist + dist0)
        prof_phase = prof.phase(pts, k, with_constant=False)
        integrand = g * np.exp(1j * (k * excess - prof_phase)) / dist
        total += wy[j] * np.sum(wx * integrand)
    path = (dist0 - frame.d_hat) - prof.phi0
    return tile.zeta / (1j * beam.wavelength) * np.exp(1j * k * path) * total


def hf_oracle_field(r_p, link: LinkGeometry, tile: Tile, beam: BeamParams, mode="separable1d", resolution: float = 1.0, rtol: float = 1e-6):
    """Numerical Huygens-Fresnel field of one tile at lens point ``r_p``.

    ``separable1d`` integrates the paraxial (first plus second order) phase
    which factorises into two 1D integrals and is tractable at optical
    wavelengths. ``exact2d`` uses the exact distance in phase and amplitude;
    it is meant for scaled geometries (tile spanning at most a few thousand
    wavelengths). The error is estimated by doubling the resolution.

    Both modes reference the carrier phase to the lens-center distance
    ``d_p`` as the closed form does, except that ``exact2d`` keeps the exact
    ``|r_o|``; the two differ by the pure lens-plane phase
    ``exp(1j k (|r_o| - d_p))``, which does not affect any intensity.
    """
    mode = OracleMode(mode)
    if tile.lx == 0 or tile.ly == 0:
        return 0.0 + 0.0j
    fn = _separable_factors if mode is OracleMode.SEPARABLE1D else _exact2d
    coarse = fn(r_p, link, tile, beam, resolution)
    fine = fn(r_p, link, tile, beam, 2 * resolution)
    if abs(fine - coarse) > rtol * max(abs(fine), 1e-300):
        raise QuadratureError(f"oracle not converged: {abs(fine - coarse) / abs(fine):.2e}")
    return complex(fine)


# ---------------------------------------------------------------------------
# GML


def _power(beam: BeamParams):
    return beam.power


def _lens_bandwidth(link: LinkGeometry, tiles, beam):
    """Largest spatial angular frequency of the tile fields on the lens."""
    c = tile_coefficients(link, tiles[0], beam, check=False).c
    xmax = max(max(abs(t.center[0] - t.lx / 2), abs(t.center[0] + t.lx / 2)) for t in tiles)
    ymax = max(max(abs(t.center[1] - t.ly / 2), abs(t.center[1] + t.ly / 2)) for t in tiles)
    # the field is negligible beyond a few footprint widths
    frame = incident_frame(beam, link.ls, link.footprint_center)
    fp = link.footprint_center
    xmax = min(xmax, abs(fp[0]) + 4 * frame.w_x)
    ymax = min(ymax, abs(fp[1]) + 4 * frame.w_y)
    return beam.k * (abs(c[0]) + abs(c[1])) * xmax, beam.k * (abs(c[2]) + abs(c[3])) * ymax


def _coherent_field(pts, coeffs, k):
    """Sum of tile fields; per-axis integrals shared between tiles with equal
    parameters (e.g. tiles of one owner in the same row or column)."""
    xp, yp = pts[:, 0], pts[:, 1]
    cache_x, cache_y = {}, {}
    total = np.zeros(xp.shape, dtype=complex)
    for cf in coeffs:
        c1, c2, c3, c4 = cf.c[:4]
        kx = (cf.b_x, cf.a_x, cf.x_range)
        ky = (cf.b_y, cf.a_y, cf.y_range)
        if kx not in cache_x:
            cache_x[kx] = gauss_segment(cf.b_x, 1j * k * (cf.a_x + c1 * xp + c2 * yp), *cf.x_range)
        if ky not in cache_y:
            cache_y[ky] = gauss_segment(cf.b_y, 1j * k * (cf.a_y + c3 * xp + c4 * yp), *cf.y_range)
        total += cf.prefactor * cache_x[kx] * cache_y[ky]
    return total


def _lens_points(a, aperture, omega, level, block=1 << 16):
    """Quadrature nodes and weights over the lens, yielded in blocks of
    about ``block`` points; ``level`` 1 meets the eight-samples-per-cycle
    contract, each further level doubles both axes."""
    if aperture == "circle":
        n_r = max(2, math.ceil(level * SAMPLES_PER_CYCLE * omega * a / (2 * math.pi) / 12))
        n_t = max(64, math.ceil(level * SAMPLES_PER_CYCLE * omega * a))
        r, wr = _gl_panels(0.0, a, n_r)
        t = 2 * math.pi * np.arange(n_t) / n_t
        ct, st = np.cos(t), np.sin(t)
        rows = max(1, block // n_t)
        for i in range(0, len(r), rows):
            rr = r[i : i + rows]
            pts = np.stack([np.outer(rr, ct), np.outer(rr, st)], axis=-1).reshape(-1, 2)
            w = np.repeat(wr[i : i + rows] * rr * 2 * math.pi / n_t, n_t)
            yield pts, w
        return
    half = math.sqrt(math.pi) * a / 2
    n = max(2, math.ceil(level * SAMPLES_PER_CYCLE * omega * 2 * half / (2 * math.pi) / 12))
    s, ws = _gl_panels(-half, half, n)
    rows = max(1, block // len(s))
    for i in range(0, len(s), rows):
        xx, yy = np.meshgrid(s[i : i + rows], s, indexing="ij")
        yield np.column_stack([xx.ravel(), yy.ravel()]), np.outer(ws[i : i + rows], ws).ravel()


def _lens_integral(coeffs, k, a, aperture, omega, level):
    acc = []
    for pts, w in _lens_points(a, aperture, omega, level):
        field = _coherent_field(pts, coeffs, k)
        acc.append(np.dot(w, np.abs(field) ** 2))
    return math.fsum(acc)


def _is_separable(coeffs, tol=1e-14):
    """True when every tile field factors into a function of ``x_p`` times a
    function of ``y_p`` (lens normal in the plane of incidence)."""
    scale = max(abs(v) for cf in coeffs for v in cf.c[:4])
    return all(abs(cf.c[1]) <= tol * scale and abs(cf.c[2]) <= tol * scale for cf in coeffs)


def _row_groups(coeffs, k, xs):
    """Group tiles sharing the same y factor: returns ``[(A, cf)]`` with
    ``A(x) = sum prefactor * I_x(x)`` over the tiles of the group."""
    cache, groups = {}, {}
    for cf in coeffs:
        kx = (cf.b_x, cf.a_x, cf.x_range)
        if kx not in cache:
            cache[kx] = gauss_segment(cf.b_x, 1j * k * (cf.a_x + cf.c[0] * xs), *cf.x_range)
        ky = (cf.b_y, cf.a_y, cf.y_range)
        if ky not in groups:
            groups[ky] = [np.zeros(xs.shape, dtype=complex), cf]
        groups[ky][0] += cf.prefactor * cache[kx]
    return list(groups.values())


def _cheb_coefficients(fn, a, n):
    """Chebyshev coefficients of ``fn`` on ``[-a, a]`` from ``n`` first-kind
    nodes via a type-II DCT."""
    x = a * np.cos(math.pi * (np.arange(n) + 0.5) / n)
    f = fn(x)
    c = (fft.dct(f.real, type=2) + 1j * fft.dct(f.imag, type=2)) / n
    c[0] /= 2
    return c


def _chord_antiderivative(fn, a, deg):
    """Chebyshev antiderivative of ``fn`` on ``[-a, a]``; the degree doubles
    until the trailing coefficients are negligible."""
    for _ in range(8):
        c = _cheb_coefficients(fn, a, deg + 1)
        mag = np.abs(c)
        if mag[-4:].max() <= 1e-13 * mag.max():
            return np.polynomial.Chebyshev(c, domain=[-a, a]).integ()
        deg *= 2
    raise QuadratureError("chord integral: Chebyshev expansion not converged")


def _lens_integral_separable(coeffs, k, a, omega_x, omega_y, level):
    """Disc integral of ``|sum_q E_q|^2`` for separable fields.

    With ``x = a sin u`` the outer integral is smooth; the inner integral
    over the chord ``|y| <= a cos u`` comes from a Chebyshev antiderivative
    of each product of y factors, so only 1D field evaluations are needed.
    """
    n_u = max(2, math.ceil(level * SAMPLES_PER_CYCLE * omega_x * a / 2 / 12))
    u, wu = _gl_panels(-math.pi / 2, math.pi / 2, n_u)
    xs = a * np.sin(u)
    chord = a * np.cos(u)
    groups = _row_groups(coeffs, k, xs)
    deg = level * (2 * math.ceil(2 * omega_y * a) + 32)

    def y_factor(cf):
        return lambda y: gauss_segment(cf.b_y, 1j * k * (cf.a_y + cf.c[3] * y), *cf.y_range)

    total = 0.0
    for i, (A_i, cf_i) in enumerate(groups):
        for j, (A_j, cf_j) in enumerate(groups[i:], start=i):
            f_i, f_j = y_factor(cf_i), y_factor(cf_j)
            anti = _chord_antiderivative(lambda y: f_i(y) * np.conj(f_j(y)), a, deg)
            g = anti(chord) - anti(-chord)
            term = np.dot(wu * chord, A_i * np.conj(A_j) * g)
            total += term.real if i == j else 2 * term.real
    return total


def gml_lens_quadrature(link: LinkGeometry, tiles, beam: BeamParams, aperture: str = "circle", rtol: float = 1e-4, verify: bool = True, return_error: bool = False, separable: bool = True):
    """GML by direct quadrature of ``|sum_q E_q|^2`` over the lens.

    ``aperture`` is ``"circle"`` (the physical lens) or ``"square"`` (equal
    area). The sampling follows the band limit of the tile fields (at least
    eight samples per cycle). When the fields are separable in the lens
    coordinates and ``separable`` is set, a chord-wise 1D scheme replaces the
    polar 2D grid. With ``verify`` the result is recomputed at
    doubled resolution and a relative change above ``rtol`` raises
    :class:`QuadratureError`.
    """
    if aperture not in ("circle", "square"):
        raise ValueError("aperture must be 'circle' or 'square'")
    tiles = list(tiles)
    if not tiles:
        return (0.0, 0.0) if return_error else 0.0
    coeffs = [tile_coefficients(link, t, beam) for t in tiles]
    omega_x, omega_y = _lens_bandwidth(link, tiles, beam)
    a = link.lens_radius
    norm = 2 * beam.impedance * _power(beam)
    if separable and aperture == "circle" and _is_separable(coeffs):
        run = lambda level: _lens_integral_separable(coeffs, beam.k, a, omega_x, omega_y, level)
    else:
        run = lambda level: _lens_integral(coeffs, beam.k, a, aperture, omega_x + omega_y, level)
    coarse = float(run(1))
    err = float("nan")
    h = coarse / norm
    if verify:
        fine = float(run(2))
        err = abs(fine - coarse) / max(abs(fine), 1e-300)
        if err > rtol and fine / norm > 1e-14:
            raise QuadratureError(f"lens quadrature not converged: {err:.2e}")
        h = fine / norm
    return (h, err) if return_error else h


def _pair_terms(link: LinkGeometry, tiles, beam: BeamParams):
    """Log-amplitudes and Gaussian coefficients of every tile field on a
    square lens of side ``sqrt(pi) a``."""
    a = link.lens_radius
    k = beam.k
    coeffs = [tile_coefficients(link, t, beam) for t in tiles]
    out = []
    for cf in coeffs:
        c1, c2, c3, c4 = cf.c[:4]
        # aperture factor frozen at the lens point (a/2, a/2)
        Xf = cf.a_x + (c1 + c2) * a / 2
        Yf = cf.a_y + (c3 + c4) * a / 2
        log_d = (
            log_gauss_segment(cf.b_x, 1j * k * Xf, *cf.x_range)
            + k**2 * Xf**2 / (4 * cf.b_x)
            - np.log(math.sqrt(math.pi) / (2 * np.sqrt(cf.b_x)))
            + log_gauss_segment(cf.b_y, 1j * k * Yf, *cf.y_range)
            + k**2 * Yf**2 / (4 * cf.b_y)
            - np.log(math.sqrt(math.pi) / (2 * np.sqrt(cf.b_y)))
        )
        log_k = np.log(cf.prefactor) + np.log(math.pi / 4) - 0.5 * np.log(cf.b_x * cf.b_y) + log_d
        out.append((cf, complex(log_k)))
    return out


def _pair_exponent(tq, ts, k):
    """Coefficients of ``log(E_q E_s^*)`` as a quadratic in ``(x_p, y_p)``."""
    cq, lq = tq
    cs, ls_ = ts
    c1, c2, c3, c4 = cq.c[:4]
    beta_x = 1 / cq.b_x + 1 / np.conj(cs.b_x)
    beta_y = 1 / cq.b_y + 1 / np.conj(cs.b_y)
    u_x = cq.a_x / cq.b_x + np.conj(cs.a_x) / np.conj(cs.b_x)
    u_y = cq.a_y / cq.b_y + np.conj(cs.a_y) / np.conj(cs.b_y)
    k4 = k**2 / 4
    rho_x = k4 * (c1**2 * beta_x + c3**2 * beta_y)
    rho_y = k4 * (c2**2 * beta_x + c4**2 * beta_y)
    rho_xy = 2 * k4 * (c1 * c2 * beta_x + c3 * c4 * beta_y)
    vr_x = 2 * k4 * (c1 * u_x + c3 * u_y)
    vr_y = 2 * k4 * (c2 * u_x + c4 * u_y)
    const = lq + np.conj(ls_) - k4 * (
        cq.a_x**2 / cq.b_x + np.conj(cs.a_x) ** 2 / np.conj(cs.b_x) + cq.a_y**2 / cq.b_y + np.conj(cs.a_y) ** 2 / np.conj(cs.b_y)
    )
    return rho_x, rho_y, rho_xy, vr_x, vr_y, const


def _hermitian_total(mat, name):
    total = np.sum(mat)
    if abs(total.imag) > 1e-9 * max(abs(total.real), 1e-300):
        raise QuadratureError(f"{name}: imaginary residue {abs(total.imag):.2e} too large")
    return float(total.real)


def gml_out_of_plane(link: LinkGeometry, tiles, beam: BeamParams, epsabs: float = 1e-8):
    """Semi-analytic GML: double sum over tile pairs with a remaining finite
    1D integral over ``y_p``, evaluated by adaptive quadrature.

    Each tile may carry its own profile (and hence its own ``b_x, b_y``).
    """
    tiles = list(tiles)
    k = beam.k
    terms = _pair_terms(link, tiles, beam)
    half = math.sqrt(math.pi) * link.lens_radius / 2
    pairs = [_pair_exponent(tq, ts, k) for tq in terms for ts in terms]
    rx, ry, rxy, vx, vy, c0 = (np.array(v) for v in zip(*pairs))
    if np.any(rx.real <= 0):
        raise RegimeError("nonpositive Re(rho_x)")
    norm = 2 * beam.impedance * _power(beam)
    # scale by the largest pair at the lens center to keep the integrand O(1)
    ref = np.max(c0.real)

    def integrand(y):
        inner = log_gauss_segment(rx, rxy * y + vx, -half, half)
        return np.exp(c0 - ref - ry * y * y - vy * y + inner)

    val, err = integrate.quad_vec(integrand, -half, half, epsabs=epsabs, epsrel=1e-10, norm="max", limit=2000)
    if not np.all(np.isfinite(val)):
        raise QuadratureError("nonconvergent y_p quadrature")
    if ref > 700:
        raise RegimeError(f"frozen aperture factor invalid: log-magnitude {ref:.3g}")
    mat = val * math.exp(ref) / norm
    return _hermitian_total(mat.reshape(len(tiles), len(tiles)), "out-of-plane GML")


def gml_in_plane(link: LinkGeometry, tiles, beam: BeamParams):
    """Fully closed-form GML for in-plane reflection (``phi_p = pi``)."""
    if abs(math.cos(link.pd.phi) + 1) > 1e-12 or abs(link.ls.phi) > 1e-12:
        raise ValueError("geometry not in-plane: requires phi_l = 0 and phi_p = pi")
    tiles = list(tiles)
    k = beam.k
    terms = _pair_terms(link, tiles, beam)
    half = math.sqrt(math.pi) * link.lens_radius / 2
    vals, refs = [], []
    for tq in terms:
        for ts in terms:
            rx, ry, _, vx, vy, c0 = _pair_exponent(tq, ts, k)
            lx = log_gauss_segment(rx, vx, -half, half)
            ly = log_gauss_segment(ry, vy, -half, half)
            vals.append(c0 + lx + ly)
            refs.append(c0.real)
    if max(refs) > 700:
        raise RegimeError(f"frozen aperture factor invalid: log-magnitude {max(refs):.3g}")
    vals = np.array(vals)
    norm = 2 * beam.impedance * _power(beam)
    mat = np.exp(vals) / norm
    return _hermitian_total(mat.reshape(len(tiles), len(tiles)), "in-plane GML")


# ---------------------------------------------------------------------------
# atmosphere and composition


def atmospheric_loss(d_l, d_p, kappa):
    """Power loss ``10**(-kappa (d_l + d_p) / 10)`` with ``kappa`` in dB/m."""
    if np.any(np.asarray(d_l) < 0) or np.any(np.asarray(d_p) < 0):
        raise ValueError("distances must be nonnegative")
    return 10.0 ** (-kappa * (np.asarray(d_l) + np.asarray(d_p)) / 10.0)


@dataclass(frozen=True)
class AtmosphereParams:
    """Attenuation ``kappa`` in dB/m and Gamma-Gamma ``(alpha, beta)``."""

    kappa: float = 0.43e-3
    alpha: float = 2.0
    beta: float = 2.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


@dataclass(frozen=True)
class ChannelGain:
    h_irs: float
    h_p: float
    h_a: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.h_irs <= 1.0 + 1e-9):
            raise ValueError("h_irs must lie in [0, 1]")
        if not (0.0 < self.h_p <= 1.0):
            raise ValueError("h_p must lie in (0, 1]")
        if not self.h_a > 0:
            raise ValueError("h_a must be positive")

    @property
    def h(self) -> float:
        return self.h_p * self.h_irs * self.h_a


def compose_channel(h_irs: float, h_p: float, h_a: float = 1.0) -> ChannelGain:
    return ChannelGain(float(h_irs), float(h_p), float(h_a))


def gml_far_field(link: LinkGeometry, beam: BeamParams, zeta_q: float | None = None, aperture: str = "circle"):
    """GML predicted by the far-field elliptical Gaussian beam of an
    anomalous mirror, integrated over the lens.

    The Gaussian intensity is integrated over the disc with the polar
    Gauss-Legendre rule of :func:`gml_lens_quadrature`.
    """
    from .irs import anomalous_widths, passivity_factor

    if zeta_q is None:
        zeta_q = passivity_factor(link.pd.theta)
    frame = incident_frame(beam, link.ls, link.footprint_center)
    w_x, w_y, _, _ = anomalous_widths(link, beam)
    zeta_t = frame.zeta_in * zeta_q / abs(math.sin(link.ls.theta))
    ratio = math.sin(link.ls.theta) / math.sin(link.pd.theta)
    peak = (beam.peak_field * beam.waist * zeta_t) ** 2 / (w_x * w_y) * ratio
    a = link.lens_radius
    omega = 4 * a / min(w_x, w_y) ** 2 * 2 * math.pi + 1.0
    acc = []
    for pts, w in _lens_points(a, aperture, omega, 2):
        acc.append(np.dot(w, np.exp(-2 * pts[:, 0] ** 2 / w_x**2 - 2 * pts[:, 1] ** 2 / w_y**2)))
    return peak * math.fsum(acc) / (2 * beam.impedance * beam.power)

"""IRS layout, tile phase-shift profiles and the closed-form field reflected
by one tile towards a receiver lens.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .beam import BeamParams, IncidentBeamFrame, RegimeError, check_ratio, incident_frame
from .geometry import LinkGeometry, OrientedNode
from .special import gauss_segment


class ProfileKind(enum.Enum):
    LP = "lp"
    QP = "qp"


@dataclass(frozen=True)
class PhaseProfile:
    """Quadratic phase profile ``k (phi0 + phi_x u + phi_y v + phi_x2 u^2 +
    phi_y2 v^2)`` with ``(u, v) = r - center``."""

    phi0: float
    phi_x: float
    phi_y: float
    phi_x2: float = 0.0
    phi_y2: float = 0.0
    center: tuple = (0.0, 0.0, 0.0)
    kind: ProfileKind = ProfileKind.LP

    def __post_init__(self):
        if self.kind is ProfileKind.LP and (self.phi_x2 != 0 or self.phi_y2 != 0):
            raise ValueError("LP profile cannot carry quadratic terms")

    def phase(self, r, k: float, with_constant: bool = True):
        """Phase shift ``Phi(r)`` in radians at IRS point(s) ``r``."""
        r = np.asarray(r, dtype=float)
        u = r[..., 0] - self.center[0]
        v = r[..., 1] - self.center[1]
        p = self.phi_x * u + self.phi_y * v + self.phi_x2 * u**2 + self.phi_y2 * v**2
        if with_constant:
            p = p + self.phi0
        return k * p


MIRROR = PhaseProfile(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Tile:
    center: tuple
    lx: float
    ly: float
    profile: PhaseProfile = MIRROR
    zeta0: float = 1.0
    zeta_bar: float = 1.0
    owner: int | None = None

    def __post_init__(self):
        if not (0 < self.zeta0 * self.zeta_bar <= 1.0 + 1e-12):
            raise ValueError("tile efficiency must lie in (0, 1]")

    @property
    def zeta(self) -> float:
        return self.zeta0 * self.zeta_bar


@dataclass(frozen=True)
class IrsLayout:
    qx: int
    qy: int
    lx: float
    ly: float
    gap_x: float
    gap_y: float
    centers: tuple

    @property
    def total_x(self) -> float:
        return self.qx * self.lx + (self.qx - 1) * self.gap_x

    @property
    def total_y(self) -> float:
        return self.qy * self.ly + (self.qy - 1) * self.gap_y

    def __len__(self):
        return self.qx * self.qy


def build_layout(lx_tot, ly_tot, qx=1, qy=1, gap_x=0.0, gap_y=0.0) -> IrsLayout:
    """Regular ``qx`` by ``qy`` tiling of an ``lx_tot`` by ``ly_tot`` surface
    centered at the origin. Tiles are ordered row by row (x fastest)."""
    if min(lx_tot, ly_tot) <= 0 or qx < 1 or qy < 1 or min(gap_x, gap_y) < 0:
        raise ValueError("layout dimensions must be positive")
    lx = (lx_tot - (qx - 1) * gap_x) / qx
    ly = (ly_tot - (qy - 1) * gap_y) / qy
    if lx <= 0 or ly <= 0:
        raise ValueError("inconsistent dimensions: gaps leave no room for tiles")
    xs = -lx_tot / 2 + lx / 2 + np.arange(qx) * (lx + gap_x)
    ys = -ly_tot / 2 + ly / 2 + np.arange(qy) * (ly + gap_y)
    centers = tuple((float(x), float(y), 0.0) for y in ys for x in xs)
    return IrsLayout(qx, qy, lx, ly, gap_x, gap_y, centers)


def lp_profile(ls: OrientedNode, pd: OrientedNode, center=(0.0, 0.0, 0.0), footprint_center=(0.0, 0.0, 0.0)) -> PhaseProfile:
    """Linear profile steering the beam of ``ls`` onto ``pd``."""
    d_hat = ls.d + footprint_center[0] * math.cos(ls.theta)
    return PhaseProfile(
        phi0=pd.d - d_hat,
        phi_x=math.cos(ls.theta) * math.cos(ls.phi) + math.cos(pd.theta) * math.cos(pd.phi),
        phi_y=math.cos(ls.theta) * math.sin(ls.phi) + math.cos(pd.theta) * math.sin(pd.phi),
        center=tuple(center),
    )


def qp_profile(ls: OrientedNode, pd: OrientedNode, frame: IncidentBeamFrame, center=(0.0, 0.0, 0.0)) -> PhaseProfile:
    """Quadratic profile: linear steering plus curvature compensation and a
    ``-1/(4 d_p)`` focusing term."""
    lin = lp_profile(ls, pd, center, frame.footprint_center)
    dp = pd.d
    ct2 = math.cos(pd.theta) ** 2
    phi_x2 = (1 + ct2 * math.cos(pd.phi) ** 2) / (2 * dp) - math.sin(ls.theta) ** 2 / (2 * frame.R) - 1 / (4 * dp)
    phi_y2 = (1 + ct2 * math.sin(pd.phi) ** 2) / (2 * dp) - 1 / (2 * frame.R) - 1 / (4 * dp)
    return replace(lin, phi_x2=phi_x2, phi_y2=phi_y2, kind=ProfileKind.QP)


def passivity_factor(theta_p: float) -> float:
    """Efficiency making a lossless tile passive: ``sqrt(|sin theta_p|)``."""
    return math.sqrt(abs(math.sin(theta_p)))


@dataclass(frozen=True)
class TileFieldCoefficients:
    """Intermediate quantities of the closed-form tile field.

    The field at lens point ``(x_p, y_p)`` is ``prefactor * Ix * Iy`` where
    ``Ix = int exp(-b_x x^2 - 1j k X x) dx`` over the tile's x-extent,
    ``X = a_x + c1 x_p + c2 y_p`` and analogously for ``y``.
    """

    k: float
    b_x: complex
    b_y: complex
    a0: complex
    b0: complex
    a_x: complex  # X at the lens center
    a_y: complex  # Y at the lens center
    c: tuple  # c1..c6
    varphi_x: float
    varphi_y: float
    delta: float
    prefactor: complex  # C * C_q
    x_range: tuple
    y_range: tuple


def tile_coefficients(link: LinkGeometry, tile: Tile, beam: BeamParams, check: bool = True) -> TileFieldCoefficients:
    """Evaluate every coefficient of the closed-form field of ``tile`` for
    the source/lens pair of ``link``.

    ``check`` validates the distance preconditions (hard ratio 10, warning
    below 100).
    """
    ls, pd = link.ls, link.pd
    frame = incident_frame(beam, ls, link.footprint_center)
    k = beam.k
    xl0, yl0 = link.footprint_center[0], link.footprint_center[1]
    xp0, yp0 = link.lens_center[0], link.lens_center[1]
    dp = pd.d
    if check:
        check_ratio(ls.d, max(tile.lx, tile.ly), "source distance vs tile size")
        check_ratio(dp, link.lens_radius, "lens distance vs lens radius")
        check_ratio(dp, max(abs(xl0), abs(yl0)), "lens distance vs footprint offset")
    st, ct = math.sin(pd.theta), math.cos(pd.theta)
    sp, cp = math.sin(pd.phi), math.cos(pd.phi)
    c = (cp * st / dp, -sp / dp, sp * st / dp, cp / dp, cp * ct / dp, sp * ct / dp)
    s2 = math.sin(ls.theta) ** 2
    nu = frame.nu
    varphi_x = -math.cos(ls.theta) - ct * cp
    varphi_y = -ct * sp
    # direction cosines of the lens center seen from the IRS origin
    ox0 = xp0 / dp - ct * cp
    oy0 = yp0 / dp - ct * sp
    prof = tile.profile
    b_x = nu * s2 - 1j * k / (2 * dp) * (1 - ox0**2) + 1j * k * prof.phi_x2
    b_y = nu - 1j * k / (2 * dp) * (1 - oy0**2) + 1j * k * prof.phi_y2
    if b_x.real <= 0 or b_y.real <= 0:
        raise RegimeError("nonpositive Re(b): Gaussian integral diverges")
    a0 = 2j * nu * xl0 * s2 / k + xp0 / dp + varphi_x
    b0 = 2j * nu * yl0 / k + yp0 / dp + varphi_y
    xt, yt = prof.center[0], prof.center[1]
    a_x = a0 + prof.phi_x - 2 * xt * prof.phi_x2
    a_y = b0 + prof.phi_y - 2 * yt * prof.phi_y2
    delta_rest = -prof.phi_x2 * xt**2 - prof.phi_y2 * yt**2 + prof.phi_x * xt + prof.phi_y * yt
    delta = delta_rest - prof.phi0
    # large constant path lengths cancel before multiplying by k
    path = ((dp - frame.d_hat) - prof.phi0) + delta_rest
    amp = beam.peak_field * beam.waist * frame.zeta_in / (1j * beam.wavelength * frame.w * dp)
    prefactor = tile.zeta * amp * np.exp(1j * k * path + 1j * frame.gouy - nu * s2 * xl0**2 - nu * yl0**2)
    xq, yq = tile.center[0], tile.center[1]
    return TileFieldCoefficients(
        k=k,
        b_x=complex(b_x),
        b_y=complex(b_y),
        a0=complex(a0),
        b0=complex(b0),
        a_x=complex(a_x),
        a_y=complex(a_y),
        c=c,
        varphi_x=varphi_x,
        varphi_y=varphi_y,
        delta=delta,
        prefactor=complex(prefactor),
        x_range=(xq - tile.lx / 2, xq + tile.lx / 2),
        y_range=(yq - tile.ly / 2, yq + tile.ly / 2),
    )


def tile_field(r_p, coeffs: TileFieldCoefficients):
    """Closed-form field of one tile at lens-plane point(s) ``r_p``.

    ``r_p`` has shape ``(..., 2)`` or ``(..., 3)``; only ``x_p, y_p`` are used.
    """
    r_p = np.asarray(r_p, dtype=float)
    xp, yp = r_p[..., 0], r_p[..., 1]
    c1, c2, c3, c4 = coeffs.c[:4]
    k = coeffs.k
    X = coeffs.a_x + c1 * xp + c2 * yp
    Y = coeffs.a_y + c3 * xp + c4 * yp
    ix = gauss_segment(coeffs.b_x, 1j * k * X, *coeffs.x_range)
    iy = gauss_segment(coeffs.b_y, 1j * k * Y, *coeffs.y_range)
    return coeffs.prefactor * ix * iy


def total_field(r_p, link: LinkGeometry, tiles, beam: BeamParams, check: bool = True):
    """Coherent sum of the fields of all ``tiles`` at ``r_p``."""
    out = 0.0
    for t in tiles:
        out = out + tile_field(r_p, tile_coefficients(link, t, beam, check=check))
    return out


def _far_field_common(link: LinkGeometry, beam: BeamParams, zeta_q: float):
    if abs(link.footprint_center[0]) > 0 or abs(link.footprint_center[1]) > 0:
        raise RegimeError("far-field corollaries assume a centered footprint")
    frame = incident_frame(beam, link.ls, link.footprint_center)
    k, dp = beam.k, link.pd.d
    zeta_t = frame.zeta_in * zeta_q / abs(math.sin(link.ls.theta))
    w_y = 2 * abs(frame.nu) * dp * frame.w / k
    R_y = 4 * dp**2 * abs(frame.nu) ** 2 * frame.R / k**2
    base_phase = k * (frame.d_hat - dp) + math.pi / 2 - frame.gouy
    return frame, k, zeta_t, w_y, R_y, base_phase


def mirror_field(r_p, link: LinkGeometry, beam: BeamParams, zeta_q: float = 1.0):
    """Far-field reflection by a large conventional mirror (circular beam)."""
    frame, k, zeta_t, w_cir, R_cir, base = _far_field_common(link, beam, zeta_q)
    r_p = np.asarray(r_p, dtype=float)
    rho2 = r_p[..., 0] ** 2 + r_p[..., 1] ** 2
    psi = base - k * rho2 / (2 * R_cir)
    return beam.peak_field * beam.waist * zeta_t / w_cir * np.exp(-rho2 / w_cir**2 - 1j * psi)


def anomalous_widths(link: LinkGeometry, beam: BeamParams):
    """``(w_x, w_y, R_x, R_y)`` of the far-field elliptical reflected beam."""
    _, _, _, w_y, R_y, _ = _far_field_common(link, beam, 1.0)
    ratio = abs(math.sin(link.ls.theta)) / abs(math.sin(link.pd.theta))
    return w_y * ratio, w_y, R_y * ratio**2, R_y


def anomalous_field(r_p, link: LinkGeometry, beam: BeamParams, zeta_q: float = 1.0):
    """Far-field reflection by an anomalous (linear-phase) mirror."""
    frame, k, zeta_t, w_y, R_y, base = _far_field_common(link, beam, zeta_q)
    w_x, _, R_x, _ = anomalous_widths(link, beam)
    r_p = np.asarray(r_p, dtype=float)
    xp, yp = r_p[..., 0], r_p[..., 1]
    psi = base - k * (xp**2 / (2 * R_x) + yp**2 / (2 * R_y))
    amp = beam.peak_field * beam.waist * zeta_t / math.sqrt(w_x * w_y)
    amp *= math.sqrt(math.sin(link.ls.theta) / math.sin(link.pd.theta))
    return amp * np.exp(-(xp**2) / w_x**2 - yp**2 / w_y**2 - 1j * psi)

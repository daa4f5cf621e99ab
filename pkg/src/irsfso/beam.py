"""Gaussian laser beam, its elliptical footprint on the IRS plane and the
far-/intermediate-field distance bounds.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import OrientedNode

ETA0 = 377.0  # free-space impedance [ohm]

# ratio thresholds standing in for "much greater than"
HARD_RATIO = 10.0
SOFT_RATIO = 100.0


class GeometryWarning(UserWarning):
    """A "much larger than" precondition holds only marginally."""


class RegimeError(ValueError):
    """A model precondition is violated by more than the hard ratio."""


def check_ratio(big: float, small: float, what: str, hard=HARD_RATIO, soft=SOFT_RATIO):
    """Validate ``big >> small``: error below ``hard``, warning below ``soft``."""
    if small <= 0:
        return
    ratio = big / small
    if ratio < hard:
        raise RegimeError(f"{what}: ratio {ratio:.3g} below {hard:g}")
    if ratio < soft:
        warnings.warn(f"{what}: ratio {ratio:.3g} below {soft:g}", GeometryWarning, stacklevel=3)


@dataclass(frozen=True)
class BeamParams:
    """Gaussian source. Lengths in meters, ``peak_field`` in V/m."""

    wavelength: float
    waist: float
    peak_field: float
    impedance: float = ETA0

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.waist <= self.wavelength:
            raise ValueError("waist must exceed the wavelength (paraxial beam)")
        if self.peak_field <= 0 or self.impedance <= 0:
            raise ValueError("peak_field and impedance must be positive")

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.waist**2 / self.wavelength

    @property
    def power(self) -> float:
        """Total emitted power ``pi E0^2 w0^2 / (4 eta)`` in watts."""
        return math.pi / (4.0 * self.impedance) * self.peak_field**2 * self.waist**2


def beam_width(z, beam: BeamParams):
    """Beam radius ``w(z)`` at distance ``z`` from the waist."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("z must be nonnegative")
    out = beam.waist * np.sqrt(1.0 + (z / beam.rayleigh_range) ** 2)
    return out[()] if out.ndim == 0 else out


def curvature_radius(z, beam: BeamParams):
    """Wavefront radius ``R(z) = z (1 + (z0/z)^2)``; ``inf`` at the waist."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("z must be nonnegative")
    z0 = beam.rayleigh_range
    with np.errstate(divide="ignore"):
        out = np.where(z == 0, np.inf, z + z0**2 / np.where(z == 0, 1.0, z))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class IncidentBeamFrame:
    """Elliptical Gaussian footprint of one source on the IRS plane."""

    theta: float
    d_hat: float
    zeta_in: float
    w: float
    R: float
    w_x: float
    w_y: float
    R_x: float
    R_y: float
    footprint_center: np.ndarray
    nu: complex
    gouy: float


def incident_frame(beam: BeamParams, ls: OrientedNode, r_l0=(0.0, 0.0, 0.0), irs_size=None) -> IncidentBeamFrame:
    """Footprint parameters of the beam of ``ls`` centered at ``r_l0``.

    ``irs_size`` (largest tile or surface dimension) enables the
    ``d_l >> L`` check.
    """
    s = math.sin(ls.theta)
    if abs(s) < 1e-12:
        raise ValueError("invalid geometry: sin(theta_l) = 0")
    r_l0 = np.asarray(r_l0, dtype=float)
    if irs_size is not None:
        check_ratio(ls.d, irs_size, "source distance vs IRS size")
    d_hat = ls.d + r_l0[0] * math.cos(ls.theta)
    w = float(beam_width(d_hat, beam))
    R = float(curvature_radius(d_hat, beam))
    nu = 1.0 / w**2 + 1j * beam.k / (2.0 * R)
    return IncidentBeamFrame(
        theta=ls.theta,
        d_hat=d_hat,
        zeta_in=math.sqrt(abs(s)),
        w=w,
        R=R,
        w_x=w / abs(s),
        w_y=w,
        R_x=R / s**2,
        R_y=R,
        footprint_center=r_l0,
        nu=nu,
        gouy=math.atan(d_hat / beam.rayleigh_range),
    )


def incident_field(r, frame: IncidentBeamFrame, beam: BeamParams, carrier: bool = True):
    """Incident field on the IRS plane at point(s) ``r`` (shape ``(..., 3)``).

    With ``carrier=False`` the constant phase ``exp(-1j k d_hat)`` is
    dropped, which keeps the phase small for numerical integration.
    """
    r = np.asarray(r, dtype=float)
    x, y = r[..., 0], r[..., 1]
    xh = x - frame.footprint_center[0]
    yh = y - frame.footprint_center[1]
    k = beam.k
    psi = k * (-x * math.cos(frame.theta) + xh**2 / (2 * frame.R_x) + yh**2 / (2 * frame.R_y)) - frame.gouy
    if carrier:
        psi = psi + k * frame.d_hat
    amp = beam.peak_field * beam.waist * frame.zeta_in / frame.w
    return amp * np.exp(-(xh**2) / frame.w_x**2 - yh**2 / frame.w_y**2 - 1j * psi)


class Regime(enum.Enum):
    NEAR = "near"
    INTERMEDIATE = "intermediate"
    FAR = "far"


@dataclass(frozen=True)
class RegimeReport:
    x_e: float
    y_e: float
    d_f: float
    d_n: float
    regime: Regime | None = None


def regime_distances(x_e: float, y_e: float, wavelength: float, d_p: float | None = None) -> RegimeReport:
    """Minimum far-field distance ``d_f`` and intermediate distance ``d_n``
    for effective half-extents ``x_e, y_e``; classifies ``d_p`` if given."""
    if x_e <= 0 or y_e <= 0:
        raise ValueError("effective extents must be positive")
    s2 = x_e**2 + y_e**2
    d_f = s2 / (2.0 * wavelength)
    d_n = math.sqrt(s2 * (x_e + y_e) / (4.0 * wavelength))
    regime = None
    if d_p is not None:
        if d_p >= d_f:
            regime = Regime.FAR
        elif d_p >= d_n:
            regime = Regime.INTERMEDIATE
        else:
            regime = Regime.NEAR
    return RegimeReport(x_e, y_e, d_f, d_n, regime)


def effective_extents(tile_lx: float, tile_ly: float, frame: IncidentBeamFrame) -> tuple[float, float]:
    """``x_e = min(L_x/2, w_x)``, ``y_e = min(L_y/2, w_y)``."""
    return min(tile_lx / 2, frame.w_x), min(tile_ly / 2, frame.w_y)

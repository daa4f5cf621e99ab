"""Coordinate frames linking the IRS plane, the laser-source beam frame and
the receiver lens frame.

The IRS lies in the ``xy``-plane with its center at the origin and ``z``
pointing away from the wall. All angles are in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OrientedNode:
    """Position of a laser source or receiver lens relative to the IRS.

    Attributes
    ----------
    d : float
        Distance along the beam axis (source) or lens normal (receiver) to
        the point where it meets the IRS plane, in meters.
    theta : float
        Angle between the ``xy``-plane and the axis, in ``(0, pi)``.
    phi : float
        Angle between the axis projection on the ``xy``-plane and the
        ``x``-axis, in ``[0, 2*pi)``.
    """

    d: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise ValueError(f"distance must be positive and finite, got {self.d}")
        if abs(math.sin(self.theta)) < 1e-12:
            raise ValueError("sin(theta) must be nonzero (grazing geometry)")


def vec3(x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def rot_y(phi: float) -> np.ndarray:
    """Counter-clockwise rotation by ``phi`` around the y-axis."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def rot_z(phi: float) -> np.ndarray:
    """Counter-clockwise rotation by ``phi`` around the z-axis."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def irs_to_ls_frame(r, ls: OrientedNode, r_l0) -> np.ndarray:
    """Map IRS-plane point(s) ``r`` into the source frame (origin at the LS,
    ``z`` along the beam axis).

    ``r`` may be a single 3-vector or an ``(..., 3)`` array.
    """
    r = np.asarray(r, dtype=float)
    rt = rot_y(math.pi / 2 - ls.theta).T
    return (r - np.asarray(r_l0, dtype=float)) @ rt.T + np.array([0.0, 0.0, ls.d])


def lens_to_irs_frame(r_p, pd: OrientedNode, r_p0) -> np.ndarray:
    """Map lens-plane point(s) ``r_p`` into IRS coordinates."""
    r_p = np.asarray(r_p, dtype=float)
    m = rot_z(-pd.phi) @ rot_y(math.pi / 2 - pd.theta)
    return (r_p + np.array([0.0, 0.0, pd.d])) @ m.T + np.asarray(r_p0, dtype=float)


@dataclass(frozen=True)
class LinkGeometry:
    """One source/IRS/lens triple.

    ``footprint_center`` is where the beam axis meets the IRS,
    ``lens_center`` where the lens normal meets it.
    """

    ls: OrientedNode
    pd: OrientedNode
    lens_radius: float
    footprint_center: tuple = (0.0, 0.0, 0.0)
    lens_center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.lens_radius <= 0:
            raise ValueError("lens radius must be positive")

    @property
    def misalignment(self) -> float:
        return float(np.linalg.norm(np.subtract(self.footprint_center, self.lens_center)))

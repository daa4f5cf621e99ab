import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsfso.beam import (
    BeamParams,
    GeometryWarning,
    Regime,
    RegimeError,
    beam_width,
    check_ratio,
    curvature_radius,
    effective_extents,
    incident_field,
    incident_frame,
    regime_distances,
)
from irsfso.geometry import LinkGeometry, OrientedNode, irs_to_ls_frame, lens_to_irs_frame, rot_y, rot_z

LAM = 1550e-9
angles = st.floats(0.05, math.pi - 0.05)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10.0, 10.0))
def test_rotations_orthonormal(phi):
    for m in (rot_y(phi), rot_z(phi)):
        np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(angles, st.floats(1.0, 5000.0))
def test_irs_origin_lies_on_beam_axis(theta, d):
    ls = OrientedNode(d, theta)
    p = irs_to_ls_frame((0.0, 0.0, 0.0), ls, (0.0, 0.0, 0.0))
    np.testing.assert_allclose(p, [0.0, 0.0, d], atol=1e-9 * d)


@settings(max_examples=50, deadline=None)
@given(angles, st.floats(0.0, 2 * math.pi), st.floats(1.0, 5000.0))
def test_lens_center_maps_to_distance_d(theta, phi, d):
    pd = OrientedNode(d, theta, phi)
    p = lens_to_irs_frame((0.0, 0.0, 0.0), pd, (0.0, 0.0, 0.0))
    assert np.linalg.norm(p) == pytest.approx(d, rel=1e-12)
    # lens plane points stay at distance d along the normal
    q = lens_to_irs_frame((0.1, -0.2, 0.0), pd, (0.0, 0.0, 0.0))
    n = p / d
    assert np.dot(q, n) == pytest.approx(d, rel=1e-12)


def test_node_validation():
    with pytest.raises(ValueError):
        OrientedNode(-1.0, 1.0)
    with pytest.raises(ValueError):
        OrientedNode(1.0, 0.0)
    with pytest.raises(ValueError):
        LinkGeometry(OrientedNode(1.0, 1.0), OrientedNode(1.0, 1.0), 0.0)


def test_misalignment_distance():
    link = LinkGeometry(OrientedNode(1.0, 1.0), OrientedNode(1.0, 1.0), 0.1, (0.3, 0.4, 0.0), (0.0, 0.0, 0.0))
    assert link.misalignment == pytest.approx(0.5)


def test_beam_params_validation_and_power():
    b = BeamParams(LAM, 2.5e-3, 60e3, 377.0)
    assert b.power == pytest.approx(math.pi * 60e3**2 * 2.5e-3**2 / (4 * 377.0))
    with pytest.raises(ValueError):
        BeamParams(LAM, 1e-7, 1.0)
    with pytest.raises(ValueError):
        BeamParams(-LAM, 1e-3, 1.0)


def test_beam_width_and_curvature():
    b = BeamParams(LAM, 2.5e-3, 60e3)
    z0 = b.rayleigh_range
    assert beam_width(0.0, b) == pytest.approx(b.waist)
    assert beam_width(z0, b) == pytest.approx(b.waist * math.sqrt(2))
    assert curvature_radius(0.0, b) == math.inf
    assert curvature_radius(z0, b) == pytest.approx(2 * z0)
    with pytest.raises(ValueError):
        beam_width(-1.0, b)


@settings(max_examples=50, deadline=None)
@given(angles, st.floats(10.0, 5000.0))
def test_footprint_identities(theta, d):
    b = BeamParams(LAM, 2.5e-3, 60e3)
    fr = incident_frame(b, OrientedNode(d, theta))
    s = math.sin(theta)
    assert fr.zeta_in**2 == pytest.approx(abs(s), rel=1e-14)
    assert fr.w_x * abs(s) == pytest.approx(fr.w_y, rel=1e-14)
    assert fr.R_x * s**2 == pytest.approx(fr.R_y, rel=1e-14)


def test_incident_field_peak_and_width():
    b = BeamParams(LAM, 2.5e-3, 60e3)
    fr = incident_frame(b, OrientedNode(1000.0, math.pi / 3))
    peak = abs(complex(incident_field((0.0, 0.0, 0.0), fr, b)))
    assert peak == pytest.approx(b.peak_field * b.waist * fr.zeta_in / fr.w, rel=1e-14)
    edge = abs(complex(incident_field((fr.w_x, 0.0, 0.0), fr, b)))
    assert edge / peak == pytest.approx(math.exp(-1), rel=1e-12)
    normal = incident_frame(b, OrientedNode(1000.0, math.pi / 2))
    assert normal.w_x == pytest.approx(normal.w_y) and normal.zeta_in == pytest.approx(1.0)


def test_regime_classification():
    rep = regime_distances(0.25, 0.25, LAM)
    assert rep.d_f > rep.d_n
    assert regime_distances(0.25, 0.25, LAM, 2 * rep.d_f).regime is Regime.FAR
    assert regime_distances(0.25, 0.25, LAM, 0.5 * (rep.d_f + rep.d_n)).regime is Regime.INTERMEDIATE
    assert regime_distances(0.25, 0.25, LAM, 0.5 * rep.d_n).regime is Regime.NEAR
    with pytest.raises(ValueError):
        regime_distances(0.0, 0.1, LAM)


def test_effective_extents_bounded_by_widths():
    b = BeamParams(LAM, 2.5e-3, 60e3)
    fr = incident_frame(b, OrientedNode(1000.0, math.pi / 8))
    assert effective_extents(0.5, 0.5, fr) == (0.25, fr.w_y)
    assert effective_extents(10.0, 10.0, fr) == (fr.w_x, fr.w_y)


def test_ratio_thresholds():
    with pytest.raises(RegimeError):
        check_ratio(5.0, 1.0, "x")
    with pytest.warns(GeometryWarning):
        check_ratio(50.0, 1.0, "x")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_ratio(500.0, 1.0, "x")

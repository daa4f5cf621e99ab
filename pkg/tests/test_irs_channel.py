import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsfso.beam import BeamParams, GeometryWarning, incident_frame
from irsfso.channel import (
    ChannelGain,
    atmospheric_loss,
    compose_channel,
    gml_far_field,
    gml_in_plane,
    gml_lens_quadrature,
    gml_out_of_plane,
    hf_oracle_field,
)
from irsfso.geometry import LinkGeometry, OrientedNode
from irsfso.irs import (
    PhaseProfile,
    ProfileKind,
    Tile,
    anomalous_field,
    build_layout,
    lp_profile,
    passivity_factor,
    qp_profile,
    tile_coefficients,
    tile_field,
    total_field,
)

LAM = 1550e-9


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        yield


def table1_link(dp=3000.0):
    ls = OrientedNode(1000.0, math.pi / 3)
    pd = OrientedNode(dp, math.pi / 3, math.pi)
    return LinkGeometry(ls, pd, 0.15), BeamParams(LAM, 0.25e-3, 60e3)


def scaled_link():
    """Millimetre-wave scale geometry where the exact 2D diffraction integral
    is tractable."""
    ls, pd = OrientedNode(10.0, math.pi / 3), OrientedNode(10.0, math.pi / 4, math.pi)
    return LinkGeometry(ls, pd, 0.02), BeamParams(1e-4, 4e-3, 1e3)


def test_passivity_factor_values():
    assert passivity_factor(math.pi / 2) == pytest.approx(1.0)
    assert passivity_factor(math.pi / 6) == pytest.approx(0.70711, abs=1e-5)


def test_total_efficiency_example():
    _, beam = table1_link()
    ls, pd = OrientedNode(1000.0, math.pi / 3), OrientedNode(3000.0, math.pi / 6, math.pi)
    fr = incident_frame(beam, ls)
    zeta_t = fr.zeta_in * passivity_factor(pd.theta) / math.sin(ls.theta)
    assert zeta_t**2 == pytest.approx(0.5774, abs=1e-4)


def test_tile_rejects_active_efficiency():
    with pytest.raises(ValueError):
        Tile((0.0, 0.0, 0.0), 1.0, 1.0, zeta0=1.0, zeta_bar=1.5)


def test_lp_profile_rejects_quadratic_terms():
    with pytest.raises(ValueError):
        PhaseProfile(0.0, 0.0, 0.0, phi_x2=1.0)


def test_layout_row_major_and_gaps():
    lay = build_layout(1.0, 0.5, 2, 1, gap_x=0.1)
    assert len(lay) == 2
    assert lay.lx == pytest.approx(0.45)
    assert lay.centers[0][0] < lay.centers[1][0]
    assert lay.total_x == pytest.approx(1.0)


@pytest.mark.parametrize("kind", ["lp", "qp"])
def test_closed_form_vs_exact_diffraction_magnitude(kind):
    link, beam = scaled_link()
    fr = incident_frame(beam, link.ls)
    prof = lp_profile(link.ls, link.pd) if kind == "lp" else qp_profile(link.ls, link.pd, fr)
    tile = Tile((0.0, 0.0, 0.0), 0.04, 0.04, prof, 1.0, passivity_factor(link.pd.theta))
    cf = tile_coefficients(link, tile, beam)
    for p in [(0.0, 0.0), (0.01, -0.005), (-0.008, 0.012)]:
        e = complex(tile_field(p, cf))
        s = complex(hf_oracle_field(p, link, tile, beam, "separable1d"))
        x = complex(hf_oracle_field(p, link, tile, beam, "exact2d"))
        assert abs(e - s) <= 1e-9 * abs(s)
        # the closed form is paraxial: only magnitudes are comparable and the
        # residual is the neglected higher-order phase
        assert abs(abs(e) - abs(x)) <= 2e-3 * abs(x)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.45), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
def test_tile_splitting_is_additive(frac, w, xp, yp):
    """A tile equals the coherent sum of two tiles that partition it and share
    its phase profile."""
    link, beam = table1_link()
    prof = lp_profile(link.ls, link.pd)
    zb = passivity_factor(link.pd.theta)
    left, right = -w, w
    cut = left + frac * (right - left)
    whole = Tile((0.0, 0.0, 0.0), right - left, 0.5, prof, 1.0, zb)
    a = Tile(((left + cut) / 2, 0.0, 0.0), cut - left, 0.5, prof, 1.0, zb)
    b = Tile(((cut + right) / 2, 0.0, 0.0), right - cut, 0.5, prof, 1.0, zb)
    e = complex(total_field((xp, yp), link, [whole], beam))
    parts = complex(total_field((xp, yp), link, [a, b], beam))
    assert abs(e - parts) <= 1e-8 * abs(e) + 1e-12


def test_out_of_plane_and_in_plane_gml_agree():
    link, beam = table1_link()
    lay = build_layout(1.0, 0.5, 2, 1)
    tiles = [Tile(c, lay.lx, lay.ly, lp_profile(link.ls, link.pd), 1.0, passivity_factor(link.pd.theta)) for c in lay.centers]
    a = gml_out_of_plane(link, tiles, beam)
    b = gml_in_plane(link, tiles, beam)
    assert a == pytest.approx(b, rel=1e-6)
    assert 0 < a <= 1


def test_lens_quadrature_separable_matches_polar():
    link, beam = table1_link()
    tiles = [Tile((0.0, 0.0, 0.0), 1.0, 0.5, lp_profile(link.ls, link.pd), 1.0, passivity_factor(link.pd.theta))]
    fast = gml_lens_quadrature(link, tiles, beam)
    slow = gml_lens_quadrature(link, tiles, beam, separable=False)
    assert fast == pytest.approx(slow, rel=1e-10)


def test_far_field_gml_matches_numerical_integral_of_anomalous_beam():
    ls, pd = OrientedNode(1000.0, math.pi / 3), OrientedNode(5e6, math.pi / 4, math.pi)
    link, beam = LinkGeometry(ls, pd, 0.15), BeamParams(LAM, 0.25e-3, 60e3)
    x, w = np.polynomial.legendre.leggauss(120)
    # polar grid over the disc
    r = 0.5 * link.lens_radius * (x + 1)
    t = math.pi * (x + 1)
    R, T = np.meshgrid(r, t, indexing="ij")
    pts = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1)
    inten = np.abs(anomalous_field(pts, link, beam, passivity_factor(pd.theta))) ** 2
    total = 0.5 * link.lens_radius * math.pi * np.einsum("i,ij,j->", w * r, inten, w)
    ref = total / (2 * beam.impedance * beam.power)
    assert gml_far_field(link, beam) == pytest.approx(ref, rel=1e-8)


def test_atmospheric_loss_frozen_value():
    assert atmospheric_loss(1000.0, 3000.0, 0.43e-3) == pytest.approx(0.67298, abs=1e-5)
    with pytest.raises(ValueError):
        atmospheric_loss(-1.0, 1.0, 0.1)


def test_channel_gain_bounds():
    g = compose_channel(0.5, 0.8, 1.2)
    assert g.h == pytest.approx(0.48)
    with pytest.raises(ValueError):
        ChannelGain(1.5, 0.5)
    with pytest.raises(ValueError):
        ChannelGain(0.5, 0.0)


def test_profile_kinds():
    link, beam = table1_link()
    fr = incident_frame(beam, link.ls)
    assert lp_profile(link.ls, link.pd).kind is ProfileKind.LP
    assert qp_profile(link.ls, link.pd, fr).kind is ProfileKind.QP

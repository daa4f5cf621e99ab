import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from irsfso.beam import BeamParams, GeometryWarning
from irsfso.geometry import LinkGeometry, OrientedNode
from irsfso.irs import ProfileKind, build_layout
from irsfso.performance import (
    FadingParams,
    PerfInputs,
    average_ber,
    ber_noise_limited_series,
    capacity_lower_bound,
    instantaneous_ber,
    noise_power,
    outage_noise_limited,
    outage_upper_bound,
    sample_fading,
    snr_factors,
    threshold_sinr,
)
from irsfso.protocols import (
    Ownership,
    ProtocolKind,
    apply_misalignment,
    build_assignment,
    interference_tiles,
    irsh_owners,
)
from irsfso.special import gamma_gamma_cdf, gamma_gamma_pdf, qfunc

LAM = 1550e-9


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        yield


def two_links():
    beam = BeamParams(LAM, 0.25e-3, 60e3)
    links = [
        LinkGeometry(OrientedNode(1000.0, math.pi / 3), OrientedNode(3000.0, math.pi / 3, math.pi), 0.15),
        LinkGeometry(OrientedNode(1000.0, math.pi / 4), OrientedNode(3000.0, math.pi / 6, math.pi), 0.15),
    ]
    return links, beam


# ---------------------------------------------------------------------------
# protocols


def test_td_uses_whole_surface_in_separate_slots():
    links, beam = two_links()
    a = build_assignment(ProtocolKind.TD, links, build_layout(1.0, 0.5), beam)
    assert a.n_slots == 2
    assert [len(s) for s in a.slots] == [1, 1]
    assert a.slots[0][0].lx == pytest.approx(1.0)
    assert interference_tiles(a, 0, 1) is None
    assert a.slot_of(1) == 1


def test_irsd_places_each_pair_on_its_tile():
    links, beam = two_links()
    lay = build_layout(1.0, 0.5, 2, 1)
    a = build_assignment(ProtocolKind.IRSD, links, lay, beam, ProfileKind.QP)
    assert a.n_slots == 1
    for m in range(2):
        assert a.links[m].footprint_center == lay.centers[m]
        assert a.slots[0][m].owner == m
    assert interference_tiles(a, 0, 1) == a.slots[0]
    with pytest.raises(ValueError, match="tile-count"):
        build_assignment(ProtocolKind.IRSD, links, build_layout(1.0, 0.5, 3, 1), beam)


def test_irsh_ownership_rules():
    links, beam = two_links()
    lay = build_layout(1.0, 0.5, 8, 2)
    owners = irsh_owners(lay, [(0.0, 0.0, 0.0), (0.0, 0.0, 0.0)], Ownership.INTERLEAVED)
    assert owners.count(0) == owners.count(1) == 8
    a = build_assignment(ProtocolKind.IRSH, links, lay, beam, ownership=Ownership.INTERLEAVED)
    assert len(a.slots[0]) == 16
    # tiles of one pair share a single profile
    assert len({t.profile for t in a.slots[0] if t.owner == 0}) == 1
    with pytest.raises(ValueError, match="tile-count"):
        build_assignment(ProtocolKind.IRSH, links, build_layout(1.0, 0.5, 2, 1), beam)


def test_misalignment_moves_footprint_only():
    links, beam = two_links()
    a = build_assignment(ProtocolKind.IRSD, links, build_layout(1.0, 0.5, 2, 1), beam)
    b = apply_misalignment(a, 1, (0.17, 0.0, 0.0))
    assert b.misalignment(1) == pytest.approx(0.17)
    assert b.slots == a.slots
    with pytest.raises(ValueError):
        apply_misalignment(a, 0, (0.0, 0.0, 1.0))


# ---------------------------------------------------------------------------
# performance


def test_noise_power_and_threshold_frozen_values():
    assert noise_power(-114.0, 1e9) == pytest.approx(3.981e-12, rel=1e-3)
    thr = threshold_sinr(1.7e9, 1e9)
    assert thr == pytest.approx(66.95, abs=0.01)
    assert capacity_lower_bound(thr, 1e9) == pytest.approx(1.7e9, rel=1e-12)


def test_snr_factors():
    g = snr_factors([1.0, 2.0], [0.1, 0.2], [0.5, 0.5], 1e-3)
    np.testing.assert_allclose(g, [2.5, 20.0])


def test_fading_moments():
    rng = np.random.default_rng(0)
    h = sample_fading(FadingParams(2.0, 2.0), rng, 400000)
    assert h.mean() == pytest.approx(1.0, abs=0.01)
    # E[h^2] = (1 + 1/alpha)(1 + 1/beta)
    assert (h * h).mean() == pytest.approx(2.25, rel=0.02)


def test_instantaneous_ber_limits():
    perf = PerfInputs((100.0, 50.0))
    assert instantaneous_ber(np.zeros(2), perf) == pytest.approx(0.5)
    single = PerfInputs((100.0,))
    assert instantaneous_ber(np.array([1.0]), single) == pytest.approx(qfunc(5.0))


def test_ber_quad_matches_nested_scipy_quad():
    perf = PerfInputs((400.0, 20.0))
    f = FadingParams(2.0, 2.0)

    def integrand(h2, h1):
        return instantaneous_ber(np.array([h1, h2]), perf) * gamma_gamma_pdf(h1, 2, 2) * gamma_gamma_pdf(h2, 2, 2)

    ref, _ = integrate.dblquad(integrand, 1e-12, 40.0, 1e-12, 40.0, epsabs=1e-12, epsrel=1e-10)
    assert average_ber(perf, f) == pytest.approx(ref, rel=1e-6)


def test_noise_limited_series_matches_quadrature():
    a, b = 2.1, 1.3
    for g in (1e3, 1e4):
        val, bound = ber_noise_limited_series(g, a, b)
        ref = average_ber(PerfInputs((g,)), FadingParams(a, b))
        assert val == pytest.approx(ref, rel=1e-6)
        assert bound < 1e-6 * abs(val)
    with pytest.raises(ZeroDivisionError):
        ber_noise_limited_series(100.0, 2.0, 2.0)


def test_outage_quad_matches_independent_integral():
    perf = PerfInputs((3e4, 500.0), rate=1.7e9)
    f = FadingParams(2.0, 2.0)
    thr = perf.gamma_thr

    def integrand(h2):
        return gamma_gamma_cdf(math.sqrt(thr / 3e4 * (1 + 500.0 * h2 * h2)), 2, 2) * gamma_gamma_pdf(h2, 2, 2)

    ref = sum(integrate.quad(integrand, lo, hi, epsrel=1e-11)[0] for lo, hi in [(1e-14, 1), (1, 5), (5, 40)])
    assert outage_upper_bound(perf, f) == pytest.approx(ref, rel=1e-7)
    assert outage_noise_limited(PerfInputs((3e4,), rate=1.7e9), f) == pytest.approx(
        float(gamma_gamma_cdf(math.sqrt(thr / 3e4), 2, 2)), rel=1e-14
    )


def test_monte_carlo_unbiased_across_seeds():
    perf = PerfInputs((1e6,), rate=1.7e9)
    f = FadingParams(2.0, 2.0)
    exact = outage_noise_limited(perf, f)
    z = [(r.value - exact) / r.stderr for r in (outage_upper_bound(perf, f, "mc", trials=200000, seed=s) for s in range(20))]
    # the mean of 20 standard scores has standard deviation 1/sqrt(20)
    assert abs(np.mean(z)) < 3 / math.sqrt(20)
    assert 0.5 < np.std(z) < 1.6


def test_monte_carlo_independent_of_workers():
    perf = PerfInputs((300.0, 30.0))
    f = FadingParams(2.0, 2.0)
    a = average_ber(perf, f, "mc", trials=300000, seed=4, workers=1)
    b = average_ber(perf, f, "mc", trials=300000, seed=4, workers=3)
    assert a == b


def test_perf_inputs_validation():
    with pytest.raises(ValueError):
        PerfInputs(())
    with pytest.raises(ValueError):
        PerfInputs((1.0,), desired=1)
    with pytest.raises(ValueError):
        PerfInputs((1.0,)).gamma_thr

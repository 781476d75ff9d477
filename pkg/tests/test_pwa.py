import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvscatter.acceptance import radius_pair_spread, square_well_K, sweep
from curvscatter.geometry import GaussianDent
from curvscatter.numerics import bessel_j
from curvscatter.pwa import (ChannelResult, ChannelSet, PwaError, Radii, Scenario, SquareWell,
                             TruncationPolicy, channel_sweep, cross_lengths, extract_K,
                             kmatrix_from_solution, kmatrix_integral_check, solve_channel,
                             solve_radial, spectrum)

SIGMA = 1.0 / math.sqrt(2.0)


def test_scenario_parse():
    assert Scenario.parse("metric-only") is Scenario.METRIC_ONLY
    assert Scenario.parse(Scenario.FLAT) is Scenario.FLAT
    assert Scenario.parse("PotentialOnly") is Scenario.POTENTIAL_ONLY
    with pytest.raises(ValueError):
        Scenario.parse("curvy")
    assert Scenario.FULL.curved_metric and Scenario.FULL.with_potential
    assert not Scenario.POTENTIAL_ONLY.curved_metric
    assert not Scenario.METRIC_ONLY.with_potential


@pytest.mark.parametrize("m", [0, 4])
def test_flat_solution_is_bessel(dent, m):
    k = 2.0
    r = np.linspace(1.0, 10.0, 91)
    sol = solve_radial(dent, Scenario.FLAT, k, m, samples=r)
    ratio = sol.R / bessel_j(m, k * r)
    # compare away from the Bessel nodes, where the ratio is well defined
    ok = np.abs(bessel_j(m, k * r)) > 0.05
    c = np.median(ratio[ok])
    np.testing.assert_allclose(ratio[ok], c, rtol=1e-7)


@given(st.integers(0, 30), st.floats(0.05, 10.0))
def test_flat_K_vanishes(m, k):
    p = GaussianDent(1.0, SIGMA)
    assert abs(solve_channel(p, "flat", k, m).K) < 1e-9


def test_negative_m_is_mirrored(dent):
    assert solve_channel(dent, "full", 1.3, -2).K == solve_channel(dent, "full", 1.3, 2).K


def test_radius_pair_invariance():
    assert radius_pair_spread(1.0, "full", 1.0, 0) < 1e-6


def test_matching_radii_must_lie_outside_cutoff(dent):
    with pytest.raises(ValueError):
        solve_radial(dent, "full", 1.0, 0, radii=Radii(dent.r_cut - 0.5, dent.r_cut + 1.0))
    with pytest.raises(ValueError):
        solve_radial(dent, "full", 0.0, 0)
    with pytest.raises(ValueError):
        extract_K(1.0, 1.0, 1.0, 0, 2.0, 2.0)


def test_extract_K_reports_vanishing_denominator():
    with pytest.raises(PwaError):
        extract_K(0.0, 0.0, 1.0, 0, 6.0, 7.0)


@pytest.mark.parametrize("k", [0.3, 1.0, 2.5])
def test_square_well_phase_shift(k):
    well = SquareWell(depth=2.0, radius=1.5)
    K = solve_channel(well, "potential-only", k, 0).K
    exact = square_well_K(2.0, 1.5, k, 0)
    assert abs(K - exact) <= 1e-6 * abs(exact)


def test_square_well_small_phase_shift_absolute_accuracy():
    # K_3 at k = 0.3 is about 4e-6, so its accuracy is absolute
    well = SquareWell(depth=2.0, radius=1.5)
    K = solve_channel(well, "potential-only", 0.3, 3).K
    assert abs(K - square_well_K(2.0, 1.5, 0.3, 3)) < 1e-10


@pytest.mark.parametrize("m", [0, 3])
def test_integral_kmatrix_matches_two_radius(dent, m):
    sol = solve_radial(dent, "potential-only", 1.0, m, samples=np.linspace(0.0, dent.r_cut, 6001))
    K = kmatrix_from_solution(sol)
    assert kmatrix_integral_check(dent, 1.0, m, sol) == pytest.approx(K, rel=1e-4)


def test_integral_kmatrix_edge_cases(dent, flat):
    assert kmatrix_integral_check(flat, 1.0, 0) == 0.0
    for scenario in ("full", "metric-only"):
        with pytest.raises(ValueError):
            kmatrix_integral_check(dent, 1.0, 0, scenario=scenario)


@given(st.floats(-1e6, 1e6), st.floats(0.01, 10.0), st.integers(0, 50))
def test_channel_result_invariants(K, k, m):
    c = ChannelResult.from_K(k, m, K)
    assert abs(abs(c.S) - 1.0) < 1e-12
    assert math.tan(c.delta) == pytest.approx(K, rel=1e-9, abs=1e-15)
    assert -0.5 * math.pi < c.delta < 0.5 * math.pi
    assert c.S == pytest.approx((1 + 1j * K) / (1 - 1j * K), rel=1e-12, abs=1e-15)
    assert c.sigma == pytest.approx(4.0 / k * math.sin(c.delta) ** 2, rel=1e-15)


def test_flat_sweep(dent):
    ch = channel_sweep(dent, "flat", 3.0)
    assert all(c.delta == 0.0 for c in ch.channels)
    cl = cross_lengths(ch)
    assert (cl.sigma_tot, cl.sigma_M, cl.L_s) == (0.0, 0.0, 0.0)
    assert not np.any(cl.partials)


def test_low_k_only_s_wave_above_floor():
    ch = sweep(1.0, "full", 0.1)
    above = [c.m for c in ch.positive if abs(c.delta) >= TruncationPolicy().delta_floor]
    assert above == [0]


def test_s_channel_dominates_low_k():
    cl = cross_lengths(sweep(1.0, "full", 0.1))
    assert cl.partials[0] / cl.sigma_tot > 0.99


def test_high_k_truncation_window_and_stability(dent):
    k = 8.0
    guess = math.ceil(k * dent.r_cut)
    ch = sweep(1.0, "full", k)
    assert guess <= ch.m_max_used <= guess + 8
    relaxed = channel_sweep(dent, "full", k, TruncationPolicy(extra_abort=4 * 64))
    assert relaxed.m_max_used == ch.m_max_used
    s1, s2 = cross_lengths(ch).sigma_tot, cross_lengths(relaxed).sigma_tot
    assert abs(s1 - s2) <= 1e-8 * s1


def test_sweep_abort_is_reported(dent):
    with pytest.raises(PwaError):
        channel_sweep(dent, "full", 3.0, TruncationPolicy(delta_floor=1e-300, extra_abort=2))


@pytest.mark.parametrize("scenario,k", [("full", 1.0), ("potential-only", 0.5), ("metric-only", 6.0)])
def test_cross_length_forms_agree(scenario, k):
    ch = sweep(1.0, scenario, k)
    cl = cross_lengths(ch)
    assert cl.sigma_tot == pytest.approx(cl.sigma_tot_from_S, rel=1e-12)
    assert cl.sigma_M == pytest.approx(cl.sigma_M_from_S, rel=1e-12)
    assert cl.sigma_tot == pytest.approx(cl.partials[0] + 2 * cl.partials[1:].sum(), rel=1e-12)
    assert cl.sigma_tot >= 0.0 and cl.sigma_M >= 0.0
    assert abs(cl.L_s) < 1e-10


def test_channel_symmetry():
    ch = sweep(1.0, "full", 2.0)
    ms, S = ch.S_full()
    assert np.array_equal(ms, -ms[::-1])
    assert np.array_equal(S, S[::-1])


@given(st.lists(st.floats(-50.0, 50.0), min_size=1, max_size=12), st.floats(0.05, 5.0))
def test_cross_length_identities_on_synthetic_channels(Ks, k):
    ch = ChannelSet(k, Scenario.FULL, tuple(ChannelResult.from_K(k, m, K) for m, K in enumerate(Ks)),
                    len(Ks) - 1)
    cl = cross_lengths(ch)
    scale = 4.0 * len(Ks) / k
    assert abs(cl.sigma_tot - cl.sigma_tot_from_S) <= 1e-12 * scale
    assert abs(cl.sigma_M - cl.sigma_M_from_S) <= 1e-12 * scale
    assert abs(cl.L_s) <= 1e-12 * len(Ks)


def test_spectrum_is_independent_of_worker_count(dent):
    k = np.array([0.3, 1.1, 2.9])
    a = spectrum(dent, "full", k, jobs=1)
    b = spectrum(dent, "full", k, jobs=2)
    assert np.array_equal(a.sigma_tot, b.sigma_tot)
    assert all(np.array_equal(x, y) for x, y in zip(a.phase_shifts, b.phase_shifts))
    assert list(a.m_max_used) == list(b.m_max_used)

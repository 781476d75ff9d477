import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvscatter.acceptance import secondary_lobes, sweep
from curvscatter.observables import (N_THETA, ObservableError, amplitude_from_channels,
                                     angular_momentum_moment, default_theta_grid,
                                     directional_density, momentum_transfer_closure,
                                     optical_theorem_residual, parseval_closure)
from curvscatter.pwa import ChannelResult, ChannelSet, Scenario, cross_lengths

phase_lists = st.lists(st.floats(-50.0, 50.0), min_size=1, max_size=40)


def synthetic(Ks, k):
    res = tuple(ChannelResult.from_K(k, m, K) for m, K in enumerate(Ks))
    return ChannelSet(k, Scenario.FULL, res, len(Ks) - 1)


def test_default_grid():
    th = default_theta_grid()
    assert th.size == N_THETA
    assert th[0] == 0.0 and th[-1] < 2 * math.pi


def test_flat_amplitude_vanishes():
    ch = synthetic([0.0] * 5, 2.0)
    assert np.all(amplitude_from_channels(ch, default_theta_grid()) == 0.0)
    with pytest.raises(ObservableError):
        directional_density(ch)
    assert optical_theorem_residual(ch) == 0.0


@given(phase_lists, st.floats(0.02, 10.0))
def test_parseval_closure(Ks, k):
    assert parseval_closure(synthetic(Ks, k)).rel_error < 1e-10


@given(phase_lists, st.floats(0.02, 10.0))
def test_momentum_transfer_closure(Ks, k):
    ch = synthetic(Ks, k)
    c = momentum_transfer_closure(ch)
    assert c.channel_sum == pytest.approx(cross_lengths(ch).sigma_M, rel=1e-12, abs=1e-300)
    assert abs(c.integral - c.channel_sum) <= 1e-8 * max(c.channel_sum, 1e-12 * len(Ks) / k)


@given(phase_lists, st.floats(0.02, 10.0))
def test_reflection_symmetry_and_normalisation(Ks, k):
    ch = synthetic(Ks, k)
    if cross_lengths(ch).sigma_tot == 0.0:
        return   # includes phase shifts so small that sin^2 underflows
    d = directional_density(ch)
    w_mirror = directional_density(ch, 2 * math.pi - d.theta).w
    assert np.max(np.abs(d.w - w_mirror)) <= 1e-12 * np.max(d.w)
    assert np.all(d.w >= 0.0)
    assert d.normalisation() == pytest.approx(1.0, rel=1e-8)
    np.testing.assert_allclose(d.dsigma_dtheta, np.abs(d.amplitude) ** 2, rtol=1e-15)


@given(phase_lists, st.floats(0.02, 10.0))
def test_no_angular_momentum_transfer(Ks, k):
    ch = synthetic(Ks, k)
    assert abs(angular_momentum_moment(ch)) <= 1e-10


@given(phase_lists, st.floats(0.02, 10.0))
def test_optical_theorem(Ks, k):
    ch = synthetic(Ks, k)
    sigma = cross_lengths(ch).sigma_tot
    assert abs(optical_theorem_residual(ch)) <= 1e-8 * max(sigma, 1e-12 / k)


@pytest.mark.parametrize("f0,scenario,k", [(1.0, "full", 1.0), (2.0, "potential-only", 0.05)])
def test_optical_theorem_on_solved_channels(f0, scenario, k):
    ch = sweep(f0, scenario, k)
    assert abs(optical_theorem_residual(ch)) < 1e-8 * cross_lengths(ch).sigma_tot


def test_parseval_on_solved_channels():
    ch = sweep(1.0, "full", 8.0)
    c = parseval_closure(ch)
    assert c.rel_error < 1e-10
    assert c.channel_sum == pytest.approx(cross_lengths(ch).sigma_tot, rel=1e-12)


def test_low_k_is_isotropic():
    assert directional_density(sweep(1.0, "full", 0.1)).iso < 1.1


def test_high_k_forward_peak():
    d = directional_density(sweep(1.0, "full", 8.0))
    assert np.argmax(d.dsigma_dtheta) == 0


def test_diffraction_lobes_at_high_k():
    d = directional_density(sweep(2.0, "full", 8.0))
    assert np.argmax(d.dsigma_dtheta) == 0
    assert secondary_lobes(d) >= 1


def test_lobe_count_grows_with_k():
    counts = [secondary_lobes(directional_density(sweep(2.0, "full", k))) for k in (5.0, 8.0, 10.0)]
    assert counts[0] >= 1
    assert counts == sorted(counts) and counts[-1] > counts[0]


def test_amplitude_scalar_and_array_agree():
    ch = sweep(1.0, "full", 2.0)
    arr = amplitude_from_channels(ch, np.array([0.3]))
    assert amplitude_from_channels(ch, 0.3) == arr[0]

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvscatter.acceptance import born_2d_oracle
from curvscatter.born import (BornAmplitude, born_amplitude, born_forward,
                              born_optical_theorem_residual, born_sigma_tot, born_spectrum)
from curvscatter.geometry import GaussianDent

SIGMA = 1.0 / math.sqrt(2.0)
# mpmath quadrature of sqrt(pi/2k) int r (-U + k^2 F^2 / 2) dr at 40 digits
FORWARD_MODULUS_K2 = 0.88477712528014895885


def test_flat_profile_gives_zero(flat):
    assert born_amplitude(flat, 1.3, 0.7) == 0.0
    assert born_forward(flat, 2.0) == 0.0
    assert born_sigma_tot(flat, 0.5) == 0.0
    assert born_optical_theorem_residual(flat, 1.0) == 0.0


def test_invalid_wavenumber(dent):
    for fn in (born_forward, born_sigma_tot):
        with pytest.raises(ValueError):
            fn(dent, 0.0)
    with pytest.raises(ValueError):
        born_amplitude(dent, -1.0, 0.5)


def test_matches_direct_2d_quadrature(dent):
    a = born_amplitude(dent, 1.0, 0.5 * math.pi)
    b = born_2d_oracle(dent, 1.0, 0.5 * math.pi)
    assert abs(a - b) <= 1e-6 * abs(b)


def test_small_angle_limit_is_forward_amplitude(dent):
    fwd = born_forward(dent, 1.7)
    # a(theta) - a(0) = O(theta^2), so the limit is probed below 1e-5 rad
    for theta in (1e-5, 1e-7, 0.0):
        assert abs(born_amplitude(dent, 1.7, theta) - fwd) <= 1e-9 * abs(fwd)


def test_forward_phase_and_modulus(dent):
    a = born_forward(dent, 2.0)
    assert cmath.phase(a) == pytest.approx(0.25 * math.pi, abs=1e-15)
    assert abs(a) == pytest.approx(FORWARD_MODULUS_K2, rel=1e-10)


@given(st.floats(-2.5, 2.5).filter(lambda f: abs(f) > 0.05), st.floats(0.4, 1.5), st.floats(0.05, 6.0))
def test_forward_phase_is_quarter_pi(f0, sigma, k):
    a = born_forward(GaussianDent(f0, sigma), k)
    assert abs(cmath.phase(a) - 0.25 * math.pi) < 1e-12


@given(st.floats(0.05, 5.0), st.floats(0.0, math.pi))
def test_mirror_symmetry(k, theta):
    p = GaussianDent(1.0, SIGMA)
    a, b = born_amplitude(p, k, np.array([theta, 2.0 * math.pi - theta]))
    assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300)


def test_amplitude_continuous_in_angle(dent):
    th = np.linspace(0.0, math.pi, 401)
    a = born_amplitude(dent, 3.0, th)
    jumps = np.abs(np.diff(a))
    assert np.max(jumps) < 0.05 * np.max(np.abs(a))


def test_quadratic_scaling_in_amplitude():
    """a(eps f0) / eps^2 tends to a limit with an O(eps^2) correction."""
    k, theta = 1.2, 0.9
    eps = np.array([0.2, 0.1, 0.05])
    r = np.array([born_amplitude(GaussianDent(e, SIGMA), k, theta) / e ** 2 for e in eps])
    limit = (4.0 * r[2] - r[1]) / 3.0   # Richardson step for an eps^2 error
    d1, d2 = abs(r[1] - limit), abs(r[2] - limit)
    assert d2 < 0.3 * d1                 # error falls roughly by 4 per halving
    assert abs(r[2] - limit) < 1e-2 * abs(limit)


def test_low_k_slope(dent):
    k = np.geomspace(0.02, 0.1, 9)
    s = born_spectrum(dent, k)
    slope = np.polyfit(np.log(k), np.log(s), 1)[0]
    assert abs(slope + 1.0) < 0.1


def test_sigma_tot_is_twice_half_range_integral(dent):
    k = 1.0
    th = np.linspace(0.0, 2.0 * math.pi, 4001)
    a2 = np.abs(born_amplitude(dent, k, th)) ** 2
    full = np.trapezoid(a2, th) if hasattr(np, "trapezoid") else np.trapz(a2, th)
    assert born_sigma_tot(dent, k) == pytest.approx(full, rel=1e-6)


@pytest.mark.parametrize("f0,k", [(1.0, 1.0), (2.0, 5.0), (-1.0, 0.3)])
def test_optical_combination_vanishes(f0, k):
    p = GaussianDent(f0, SIGMA)
    assert abs(born_optical_theorem_residual(p, k)) <= 1e-10 * abs(born_forward(p, k))


def test_born_amplitude_record(dent):
    rec = BornAmplitude.of(dent, 1.0, 0.3)
    assert (rec.k, rec.theta) == (1.0, 0.3)
    assert rec.value == born_amplitude(dent, 1.0, 0.3)

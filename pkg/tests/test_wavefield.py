import math
from functools import lru_cache

import numpy as np
import pytest

from curvscatter.acceptance import dent, sweep
from curvscatter.pwa import Radii, channel_sweep
from curvscatter.wavefield import (INCIDENT_DENSITY, Grid, WaveFieldError, far_field_deviation,
                                   field_at, focus_metrics, reconstruct)

SMALL = Grid(-6.0, 8.0, -5.0, 5.0, 57, 41)


@lru_cache(maxsize=None)
def field(f0, k, grid=Grid()):
    return reconstruct(dent(f0), "full", k, grid, channels=sweep(f0, "full", k))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(1.0, 0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        Grid(nx=1)
    x, y = Grid().axes()
    assert (x.size, y.size) == (400, 400)


def test_flat_field_is_plane_wave(flat):
    f = reconstruct(flat, "full", 2.0, SMALL)
    np.testing.assert_allclose(f.density, INCIDENT_DENSITY, rtol=1e-10)
    fm = focus_metrics(f)
    assert not fm.resolved and math.isnan(fm.x_focus)
    assert fm.peak_gain == pytest.approx(1.0, rel=1e-10)


def test_flat_scenario_on_curved_profile_is_plane_wave(dent):
    f = reconstruct(dent, "flat", 3.0, SMALL)
    np.testing.assert_allclose(f.density, INCIDENT_DENSITY, rtol=1e-10)


def test_mirror_symmetry():
    f = field(1.0, 3.0, SMALL)
    scale = np.max(np.abs(f.chi))
    assert np.max(np.abs(f.chi - f.chi[::-1, :])) <= 1e-12 * scale


def test_seam_continuity():
    ch = sweep(1.0, "full", 3.0)
    p = dent(1.0)
    seam = Radii.default(p, 3.0).r2
    th = np.linspace(0.0, 2 * math.pi, 37)
    inside = field_at(p, ch, (seam * (1 - 1e-12)) * np.cos(th), (seam * (1 - 1e-12)) * np.sin(th))
    outside = field_at(p, ch, (seam * (1 + 1e-12)) * np.cos(th), (seam * (1 + 1e-12)) * np.sin(th))
    assert np.max(np.abs(inside - outside) / np.abs(outside)) < 1e-3


def test_truncation_stability():
    p = dent(1.0)
    base = reconstruct(p, "full", 4.0, SMALL)
    swept = sweep(1.0, "full", 4.0)
    # eight channels beyond everything the converged field used
    extra = base.m_max_used - swept.m_max_used + 8
    more_ch = channel_sweep(p, "full", 4.0, extra_channels=extra)
    more = reconstruct(p, "full", 4.0, SMALL, channels=more_ch)
    assert more.m_max_used >= base.m_max_used + 8
    assert np.max(np.abs(more.density - base.density) / base.density) < 1e-6


def test_interior_channels_extend_the_sweep():
    ch = sweep(1.0, "full", 4.0)
    f = reconstruct(dent(1.0), "full", 4.0, SMALL, channels=ch)
    assert f.m_max_used > ch.m_max_used


def test_far_field_low_k():
    ch = sweep(1.0, "full", 1.0)
    r = 3 * Radii.default(dent(1.0), 1.0).r2
    assert far_field_deviation(dent(1.0), ch, r) < 0.01


def test_channels_must_match_request(dent):
    with pytest.raises(WaveFieldError):
        reconstruct(dent, "full", 2.0, SMALL, channels=sweep(1.0, "full", 3.0))
    with pytest.raises(WaveFieldError):
        reconstruct(dent, "metric-only", 3.0, SMALL, channels=sweep(1.0, "full", 3.0))


def test_focus_behind_dent():
    fm = focus_metrics(field(1.0, 7.5))
    assert fm.resolved and fm.on_forward_axis
    assert fm.x_focus > 0.0
    assert fm.peak_gain > 1.0


def test_focus_moves_forward_with_energy():
    x5 = focus_metrics(field(1.0, 5.0)).x_focus
    x75 = focus_metrics(field(1.0, 7.5)).x_focus
    assert x75 > x5


def test_gain_grows_with_amplitude():
    assert focus_metrics(field(2.0, 7.5)).peak_gain > focus_metrics(field(0.5, 7.5)).peak_gain


def test_unresolved_when_peak_on_boundary():
    # the window ends right behind the dent, so the focal maximum sits on its edge
    f = field(1.0, 7.5, Grid(-3.0, 0.8, -2.0, 2.0, 39, 41))
    assert not focus_metrics(f).resolved

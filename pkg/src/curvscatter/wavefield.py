"""Stationary scattering wave on a Cartesian grid, for incidence along +x.

The field is assembled channel by channel.  With ``X_m(r)`` the radial
solution normalised to ``J_m(kr) - K_m Y_m(kr)`` outside the dent,

    2 pi chi = e^{ikx} + sum_m i^m [e^{i delta_m} cos(delta_m) X_m(r) - J_m(kr)] e^{i m theta}.

Inside the seam radius ``X_m`` is interpolated (cubic Hermite) from dense
ODE samples; outside it the bracket equals ``(S_m - 1) H^(1)_m(kr) / 2``
exactly, which tends to the asymptotic form ``a(theta) e^{ikr} / sqrt(r)``
for large r.  The two representations agree at the seam up to ODE error.

Channels whose phase shift has died out can still matter inside the dent,
where the stretched metric makes ``X_m`` decay faster towards the centre
than ``J_m``.  The channel list is therefore extended until the bracket
itself is negligible on the interior table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import jy_table
from .numerics.bessel import M_MAX
from .observables import amplitude_from_channels
from .pwa import (ChannelResult, ChannelSet, Radii, Scenario, TruncationPolicy, _hermite,
                  channel_sweep, kmatrix_from_solution, normalisation, solve_radial)

INCIDENT_DENSITY = 1.0 / (2.0 * math.pi) ** 2
# interior bracket magnitude (on the 2 pi chi scale) below which a channel is dropped
INTERIOR_TOL = 1e-10
_INTERIOR_QUIET = 3
_CHUNK = 20000


class WaveFieldError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    """Cartesian sampling window; ``x`` varies along columns, ``y`` along rows."""

    x_min: float = -10.0
    x_max: float = 20.0
    y_min: float = -15.0
    y_max: float = 15.0
    nx: int = 400
    ny: int = 400

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("empty grid window")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 points per axis")

    def axes(self):
        return np.linspace(self.x_min, self.x_max, self.nx), np.linspace(self.y_min, self.y_max, self.ny)


@dataclass(frozen=True)
class WaveField:
    k: float
    scenario: Scenario
    x: np.ndarray
    y: np.ndarray
    chi: np.ndarray              # shape (len(y), len(x))
    seam_radius: float
    m_max_used: int

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.chi) ** 2


@dataclass(frozen=True)
class _RadialTable:
    r: np.ndarray
    X: np.ndarray                # (M+1, n) normalised radial functions
    dX: np.ndarray


def _radial_table(profile, channels: ChannelSet, seam: float, radii: Radii,
                  interior_tol: float | None = INTERIOR_TOL):
    """Normalised radial functions on [0, seam] and the channel set they cover.

    With ``interior_tol`` set, channels beyond ``channels.m_max_used`` are
    appended until ``_INTERIOR_QUIET`` consecutive ones have an interior
    bracket below the tolerance.
    """
    k = channels.k
    if channels.scenario is Scenario.FLAT or profile.is_flat:
        return None, channels
    # 64 samples per wavelength, and at least 0.01 sigma resolution of the dent
    h = min(2.0 * math.pi / (64.0 * k), 0.01 * profile.length_scale)
    n = int(math.ceil(seam / h)) + 1
    r = np.linspace(0.0, seam, n)

    def normalised(m):
        sol = solve_radial(profile, channels.scenario, k, m, radii=radii, samples=r)
        K = kmatrix_from_solution(sol)
        scale = normalisation(sol, K)
        return K, scale * sol.R, scale * sol.dR

    X, dX = [], []
    for c in channels.positive:
        K, Xm, dXm = normalised(c.m)
        if not math.isclose(K, c.K, rel_tol=1e-9, abs_tol=1e-14):
            raise WaveFieldError(f"channel {c.m} re-solve disagrees with the sweep ({K} vs {c.K})")
        X.append(Xm)
        dX.append(dXm)
    results = list(channels.positive)
    if interior_tol is not None:
        quiet = 0
        while quiet < _INTERIOR_QUIET:
            m = len(results)
            if m > M_MAX:
                raise WaveFieldError(f"interior field not converged by m = {M_MAX} at k = {k}")
            K, Xm, dXm = normalised(m)
            c = ChannelResult.from_K(k, m, K)
            j, _ = jy_table(m, k * r, with_y=False)
            bracket = np.max(np.abs(np.exp(1j * c.delta) * math.cos(c.delta) * Xm - j[m]))
            quiet = quiet + 1 if bracket < interior_tol else 0
            results.append(c)
            X.append(Xm)
            dX.append(dXm)
    used = ChannelSet(k, channels.scenario, tuple(results), len(results) - 1)
    return _RadialTable(r, np.array(X), np.array(dX)), used


def _field_points(channels: ChannelSet, table, seam: float, x: np.ndarray, y: np.ndarray):
    """``chi`` at flat arrays of points."""
    k = channels.k
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    chi = np.exp(1j * k * x)
    if table is None:
        return chi / (2.0 * math.pi)
    M = len(channels.positive) - 1
    deltas = np.array([c.delta for c in channels.positive])
    S = np.array([c.S for c in channels.positive])
    phase = np.exp(1j * deltas) * np.cos(deltas)
    im = 1j ** np.arange(M + 1)
    # m and -m give the same bracket, so the sum folds into a cosine series
    fold = np.where(np.arange(M + 1) == 0, 1.0, 2.0)

    inner = r < seam
    if np.any(inner):
        ri, ti = r[inner], theta[inner]
        j, _ = jy_table(M, k * ri, with_y=False)
        acc = np.zeros(ri.size, dtype=complex)
        for m in range(M + 1):
            Xm = _hermite(table.r, table.X[m], table.dX[m], ri)
            acc += fold[m] * im[m] * (phase[m] * Xm - j[m]) * np.cos(m * ti)
        chi[inner] += acc
    outer = ~inner
    if np.any(outer):
        ro, to = r[outer], theta[outer]
        j, yv = jy_table(M, k * ro)
        coef = fold * im * 0.5 * (S - 1.0)
        acc = np.zeros(ro.size, dtype=complex)
        for m in range(M + 1):
            acc += coef[m] * (j[m] + 1j * yv[m]) * np.cos(m * to)
        chi[outer] += acc
    return chi / (2.0 * math.pi)


def reconstruct(profile, scenario, k: float, grid: Grid | None = None, *,
                channels: ChannelSet | None = None, policy: TruncationPolicy | None = None,
                extra_channels: int = 0, radii: Radii | None = None) -> WaveField:
    """Scattering wave ``chi`` on ``grid`` for a plane wave incident along +x.

    Channel data are computed with :func:`~curvscatter.pwa.channel_sweep`
    unless supplied.  ``extra_channels`` appends channels beyond the
    truncation point, for stability checks.  Either way the set is then
    extended until the interior field has converged, and
    ``WaveField.m_max_used`` reports the final count.
    """
    scenario = Scenario.parse(scenario)
    grid = grid or Grid()
    if channels is None:
        channels = channel_sweep(profile, scenario, k, policy, extra_channels=extra_channels)
    elif channels.k != k or channels.scenario is not scenario:
        raise WaveFieldError("supplied channels do not match the requested k and scenario")
    radii = radii or Radii.default(profile, k)
    seam = radii.r2
    table, channels = _radial_table(profile, channels, seam, radii)
    xs, ys = grid.axes()
    X, Y = np.meshgrid(xs, ys)
    flat_x, flat_y = X.ravel(), Y.ravel()
    chi = np.empty(flat_x.size, dtype=complex)
    for lo in range(0, flat_x.size, _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        chi[sl] = _field_points(channels, table, seam, flat_x[sl], flat_y[sl])
    return WaveField(k, scenario, xs, ys, chi.reshape(X.shape), seam, channels.m_max_used)


def field_at(profile, channels: ChannelSet, x, y, radii: Radii | None = None) -> np.ndarray:
    """``chi`` at arbitrary points, with the same seam as :func:`reconstruct`."""
    radii = radii or Radii.default(profile, channels.k)
    table, channels = _radial_table(profile, channels, radii.r2, radii)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = _field_points(channels, table, radii.r2, x.ravel(), y.ravel())
    return out.reshape(x.shape)


def asymptotic_chi(channels: ChannelSet, x, y) -> np.ndarray:
    """Far-field form ``(e^{ikx} + a(theta) e^{ikr} / sqrt(r)) / (2 pi)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = channels.k
    r = np.hypot(x, y)
    a = amplitude_from_channels(channels, np.arctan2(y, x).ravel()).reshape(r.shape)
    return (np.exp(1j * k * x) + a * np.exp(1j * k * r) / np.sqrt(r)) / (2.0 * math.pi)


def far_field_deviation(profile, channels: ChannelSet, radius: float, n_angles: int = 720) -> float:
    """Largest relative deviation of ``|chi|^2`` from the far-field form on a circle."""
    th = 2.0 * math.pi * np.arange(n_angles) / n_angles
    x, y = radius * np.cos(th), radius * np.sin(th)
    exact = np.abs(field_at(profile, channels, x, y)) ** 2
    approx = np.abs(asymptotic_chi(channels, x, y)) ** 2
    return float(np.max(np.abs(exact - approx) / exact))


@dataclass(frozen=True)
class FocusMetrics:
    x_focus: float               # nan when unresolved
    y_focus: float
    peak_gain: float             # max |chi|^2 relative to the incident 1/(2 pi)^2
    on_forward_axis: bool
    resolved: bool


def focus_metrics(field: WaveField) -> FocusMetrics:
    """Location and gain of the global maximum of ``|chi|^2``.

    The maximum counts as on the forward axis when it sits in one of the
    grid rows adjacent to ``y = 0`` at positive x.  It is unresolved when
    the density is uniform or the maximum touches the grid boundary.
    """
    d = field.density
    peak = float(d.max())
    gain = peak / INCIDENT_DENSITY
    if peak - float(d.min()) <= 1e-9 * peak:
        return FocusMetrics(math.nan, math.nan, gain, False, False)
    iy, ix = np.unravel_index(int(np.argmax(d)), d.shape)
    on_edge = ix in (0, d.shape[1] - 1) or iy in (0, d.shape[0] - 1)
    dy = field.y[1] - field.y[0]
    x_f, y_f = float(field.x[ix]), float(field.y[iy])
    on_axis = x_f > 0.0 and abs(y_f) <= dy
    return FocusMetrics(x_f, y_f, gain, bool(on_axis), not on_edge)

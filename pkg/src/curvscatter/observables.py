"""Angular observables assembled from partial-wave channel data.

The amplitude uses the normalisation

    a(theta) = e^{-i pi/4} / sqrt(2 pi k) * sum_m (S_m - 1) e^{i m theta},

for which ``int_0^{2pi} |a|^2 dtheta = (1/k) sum_m |S_m - 1|^2`` is the
total cross length.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .pwa import ChannelSet

N_THETA = 720
_PHASE = cmath.exp(-0.25j * math.pi)


class ObservableError(ValueError):
    pass


def default_theta_grid(n: int = N_THETA) -> np.ndarray:
    """``n`` uniform angles on [0, 2 pi)."""
    return 2.0 * math.pi * np.arange(n) / n


def _coefficients(channels: ChannelSet) -> np.ndarray:
    """``S_m - 1`` for m = 0..M."""
    return np.array([c.S for c in channels.positive]) - 1.0


def amplitude_from_channels(channels: ChannelSet, theta):
    """Scattering amplitude at ``theta`` (scalar or array).

    Uses ``S_m = S_{-m}`` to write the sum as a cosine series, so the
    result is exactly even in ``theta``.
    """
    c = _coefficients(channels)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    m = np.arange(c.size)
    weights = np.where(m == 0, 1.0, 2.0) * c
    series = np.cos(np.outer(th, m)) @ weights
    out = _PHASE / math.sqrt(2.0 * math.pi * channels.k) * series
    return complex(out[0]) if np.ndim(theta) == 0 else out


def _sum_sigma_tot(channels: ChannelSet) -> float:
    """``(1/k) sum_{m in Z} |S_m - 1|^2``."""
    w = np.abs(_coefficients(channels)) ** 2
    return float(w[0] + 2.0 * w[1:].sum()) / channels.k


def _sum_sigma_M(channels: ChannelSet) -> float:
    """``(1/2k) sum_{m in Z} |S_{m+1} - S_m|^2``."""
    _, S = channels.S_full()
    S_ext = np.concatenate([[1.0], S, [1.0]])
    return float(np.sum(np.abs(np.diff(S_ext)) ** 2)) / (2.0 * channels.k)


@dataclass(frozen=True)
class AngularDistribution:
    k: float
    theta: np.ndarray
    amplitude: np.ndarray
    dsigma_dtheta: np.ndarray
    w: np.ndarray
    sigma_tot: float

    @property
    def iso(self) -> float:
        """Isotropy measure ``max w / min w`` (1 for a perfectly isotropic pattern)."""
        lo = float(np.min(self.w))
        return math.inf if lo <= 0.0 else float(np.max(self.w)) / lo

    def normalisation(self) -> float:
        """``int w dtheta`` by the periodic trapezoid rule.

        Exact up to rounding while the grid has more than 2M points, since
        ``w`` is a trigonometric polynomial of degree 2M.
        """
        return float(np.sum(self.w)) * (2.0 * math.pi / self.theta.size)

    def lobes(self) -> np.ndarray:
        """Angles in [0, pi] of local maxima of ``dsigma/dtheta`` (periodic neighbours)."""
        d = self.dsigma_dtheta
        peak = (d > np.roll(d, 1)) & (d >= np.roll(d, -1))
        th = self.theta[peak]
        return th[th <= math.pi + 1e-12]


def directional_density(channels: ChannelSet, theta=None) -> AngularDistribution:
    """Differential cross length and normalised density ``w = (dsigma/dtheta) / sigma_tot``.

    ``sigma_tot`` comes from the channel sum, so ``w`` integrates to one
    independently of the angular grid.
    """
    theta = default_theta_grid() if theta is None else np.asarray(theta, dtype=float)
    sigma = _sum_sigma_tot(channels)
    if sigma <= 0.0:
        raise ObservableError("total cross length is zero; the directional density is undefined")
    a = amplitude_from_channels(channels, theta)
    d = np.abs(a) ** 2
    return AngularDistribution(channels.k, theta, a, d, d / sigma, sigma)


def optical_theorem_residual(channels: ChannelSet) -> float:
    """``sigma_tot - 2 sqrt(pi/k) (Im a(0) - Re a(0))``.

    With ``|S_m| = 1``, ``|S_m - 1|^2 = 2 - 2 Re S_m`` makes this vanish
    identically; numerically it measures unitarity of the channel data.
    """
    k = channels.k
    a0 = amplitude_from_channels(channels, 0.0)
    return _sum_sigma_tot(channels) - 2.0 * math.sqrt(math.pi / k) * (a0.imag - a0.real)


@dataclass(frozen=True)
class Closure:
    integral: float
    channel_sum: float

    @property
    def rel_error(self) -> float:
        if self.channel_sum == 0.0:
            return abs(self.integral)
        return abs(self.integral - self.channel_sum) / abs(self.channel_sum)


def _grid_for(channels: ChannelSet, n: int | None):
    # 2M + 2 points integrate the degree-(2M+1) integrands exactly
    need = 2 * channels.m_max_used + 4
    return default_theta_grid(max(n or N_THETA, need))


def parseval_closure(channels: ChannelSet, n_theta: int | None = None) -> Closure:
    """``int_0^{2pi} |a|^2 dtheta`` against ``(1/k) sum |S_m - 1|^2``."""
    th = _grid_for(channels, n_theta)
    a = amplitude_from_channels(channels, th)
    integral = float(np.sum(np.abs(a) ** 2)) * (2.0 * math.pi / th.size)
    return Closure(integral, _sum_sigma_tot(channels))


def momentum_transfer_closure(channels: ChannelSet, n_theta: int | None = None) -> Closure:
    """``int (1 - cos theta) |a|^2 dtheta`` against ``(1/2k) sum |S_{m+1} - S_m|^2``."""
    th = _grid_for(channels, n_theta)
    a = amplitude_from_channels(channels, th)
    integral = float(np.sum((1.0 - np.cos(th)) * np.abs(a) ** 2)) * (2.0 * math.pi / th.size)
    return Closure(integral, _sum_sigma_M(channels))


def angular_momentum_moment(channels: ChannelSet) -> float:
    """``sum_{m in Z} m |S_m - 1|^2``; zero for mirror-symmetric channel data."""
    ms, S = channels.S_full()
    return float(np.sum(ms * np.abs(S - 1.0) ** 2))

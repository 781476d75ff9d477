"""Differential geometry of axially symmetric Monge surfaces z = f(r).

Everything is in reduced units: lengths in a0 and hbar^2 / (2 m0) = 1, so
the geometric potential enters the radial equation directly as
``U_geo = (2 m0 / hbar^2) V_geo`` with units a0^-2.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

SLOPE_TOL = 1e-10
POT_TOL = 1e-12
PWA_TOL = 1e-12
# below this fraction of the length scale the r -> 0 limits are used
SERIES_RADIUS = 1e-8


class ProfileError(ValueError):
    pass


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(~np.isfinite(r)):
        raise ValueError("radius must be finite and non-negative")
    return r


def _out(r_in, value):
    return float(value) if np.ndim(r_in) == 0 else value


class SurfaceProfile(ABC):
    """Radial height profile of an asymptotically flat surface.

    Subclasses supply ``f``, ``f'`` and ``f''`` as vectorised functions and
    a characteristic ``length_scale``; the cutoff radius and all derived
    quantities follow from those.
    """

    length_scale: float

    @abstractmethod
    def height(self, r): ...

    @abstractmethod
    def dheight(self, r): ...

    @abstractmethod
    def d2height(self, r): ...

    @property
    @abstractmethod
    def r_cut(self) -> float: ...

    @property
    def is_flat(self) -> bool:
        return False

    # -- derived quantities -------------------------------------------------

    def slope_F(self, r):
        """Return ``(f', F)`` with ``F = f' / sqrt(1 + f'^2)``."""
        r_in = r
        r = _check_r(r)
        df = self.dheight(r)
        F = df / np.sqrt(1.0 + df * df)
        return _out(r_in, df), _out(r_in, F)

    def dF(self, r):
        r = _check_r(r)
        df = self.dheight(r)
        return self.d2height(r) / (1.0 + df * df) ** 1.5

    def v(self, r):
        """Inverse square root of the radial metric component."""
        r_in = r
        r = _check_r(r)
        df = self.dheight(r)
        return _out(r_in, 1.0 / np.sqrt(1.0 + df * df))

    def curvatures(self, r):
        """Gaussian curvature K and mean curvature M."""
        r_in = r
        r = np.atleast_1d(_check_r(r))
        df = self.dheight(r)
        F = df / np.sqrt(1.0 + df * df)
        dF = self.d2height(r) / (1.0 + df * df) ** 1.5
        near = r < SERIES_RADIUS * self.length_scale
        rs = np.where(near, 1.0, r)
        K = np.where(near, 0.0, F * dF / rs)
        M = np.where(near, 0.0, 0.5 * (F / rs + dF))
        if np.any(near):
            c = float(self.d2height(np.array([0.0]))[0])
            K = np.where(near, c * c, K)
            M = np.where(near, c, M)
        if np.ndim(r_in) == 0:
            return float(K[0]), float(M[0])
        return K, M

    def reduced_geo_potential(self, r):
        """``U_geo = -(F/r - F')^2 / 4``; zero at the symmetry centre."""
        r_in = r
        r = np.atleast_1d(_check_r(r))
        df = self.dheight(r)
        F = df / np.sqrt(1.0 + df * df)
        dF = self.d2height(r) / (1.0 + df * df) ** 1.5
        near = r < SERIES_RADIUS * self.length_scale
        rs = np.where(near, 1.0, r)
        U = np.where(near, 0.0, -0.25 * (F / rs - dF) ** 2)
        return float(U[0]) if np.ndim(r_in) == 0 else U

    def radial_coefficients(self, r: float):
        """Scalar ``(v, U_geo)`` at ``r``; used in the radial ODE right-hand side."""
        if r >= self.r_cut:
            return 1.0, 0.0
        return self.v(r), self.reduced_geo_potential(r)

    def max_abs_potential(self) -> float:
        r = np.linspace(0.0, self.r_cut, 4001)
        return float(np.max(np.abs(self.reduced_geo_potential(r))))

    def evaluate(self, r) -> "GeometryEval":
        r = float(r)
        df, F = self.slope_F(r)
        K, M = self.curvatures(r)
        return GeometryEval(
            r=r, f=float(self.height(r)), df=df, F=F, g_rr=1.0 + df * df, g_phiphi=r * r,
            v=1.0 / math.sqrt(1.0 + df * df), K=K, M=M, U_geo=self.reduced_geo_potential(r))

    # -- construction helpers -----------------------------------------------

    def _find_r_cut(self) -> float:
        def flat(r):
            return (abs(float(self.dheight(np.array([r]))[0])) < SLOPE_TOL
                    and abs(float(self.reduced_geo_potential(r))) < POT_TOL)

        s = self.length_scale
        lo, hi = 0.0, s
        while not (flat(hi) and flat(1.5 * hi) and flat(2.0 * hi)):
            lo, hi = hi, 2.0 * hi
            if hi > 1e4 * s:
                raise ProfileError("profile does not become flat within 1e4 length scales")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if flat(mid):
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-12 * s:
                break
        return hi

    def _validate_cut(self, r_cut: float) -> None:
        df = float(self.dheight(np.array([r_cut]))[0])
        if abs(df) >= SLOPE_TOL:
            raise ProfileError(f"slope {df:.3e} at r_cut = {r_cut} exceeds {SLOPE_TOL}")
        U = self.reduced_geo_potential(r_cut)
        if abs(U) >= POT_TOL:
            raise ProfileError(f"geometric potential {U:.3e} at r_cut exceeds {POT_TOL}")
        w = 1.0 / math.sqrt(1.0 + df * df) - 1.0
        if r_cut * r_cut * abs(w) >= PWA_TOL:
            raise ProfileError("metric deviation at r_cut violates the partial-wave condition")


@dataclass(frozen=True)
class GeometryEval:
    r: float
    f: float
    df: float
    F: float
    g_rr: float
    g_phiphi: float
    v: float
    K: float
    M: float
    U_geo: float


@dataclass(frozen=True)
class GaussianDent(SurfaceProfile):
    """``f(r) = f0 exp(-r^2 / (2 sigma^2))``; f0 may have either sign."""

    f0: float
    sigma: float
    r_cut_override: float | None = None
    _r_cut: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ProfileError(f"sigma must be positive, got {self.sigma}")
        if not math.isfinite(self.f0):
            raise ProfileError("f0 must be finite")
        if self.r_cut_override is not None:
            if not self.r_cut_override > 0:
                raise ProfileError("r_cut must be positive")
            r_cut = float(self.r_cut_override)
        elif self.f0 == 0.0:
            r_cut = self.sigma
        else:
            r_cut = self._find_r_cut()
        object.__setattr__(self, "_r_cut", r_cut)
        self._validate_cut(r_cut)

    @property
    def length_scale(self) -> float:
        return self.sigma

    @property
    def r_cut(self) -> float:
        return self._r_cut

    @property
    def is_flat(self) -> bool:
        return self.f0 == 0.0

    def height(self, r):
        r_in = r
        r = _check_r(r)
        return _out(r_in, self.f0 * np.exp(-r * r / (2.0 * self.sigma ** 2)))

    def dheight(self, r):
        s2 = self.sigma ** 2
        return -self.f0 * r / s2 * np.exp(-r * r / (2.0 * s2))

    def d2height(self, r):
        s2 = self.sigma ** 2
        return -self.f0 / s2 * (1.0 - r * r / s2) * np.exp(-r * r / (2.0 * s2))

    def reduced_geo_potential(self, r):
        # closed form with exp(-r^2/sigma^2) factored out: no cancellation, no overflow
        r_in = r
        r = _check_r(r)
        s2 = self.sigma ** 2
        f2 = self.f0 * self.f0
        e = np.exp(-r * r / s2)
        U = -0.25 * f2 * r ** 4 * e * (f2 * e + s2) ** 2 / (f2 * r * r * e + s2 * s2) ** 3
        return _out(r_in, U)

    def radial_coefficients(self, r: float):
        if r >= self._r_cut:
            return 1.0, 0.0
        s2 = self.sigma * self.sigma
        f2 = self.f0 * self.f0
        g = math.exp(-r * r / (2.0 * s2))
        df = -self.f0 * r / s2 * g
        e = g * g
        U = -0.25 * f2 * r ** 4 * e * (f2 * e + s2) ** 2 / (f2 * r * r * e + s2 * s2) ** 3
        return 1.0 / math.sqrt(1.0 + df * df), U

    def radial_rhs(self, curved: bool, with_potential: bool, k2: float, m2: float):
        """Fused right-hand side of the radial system in ``(R, r v R')``.

        Equivalent to building it from :meth:`radial_coefficients`, but with
        the Gaussian factors inlined; the channel sweeps spend most of their
        time here.
        """
        r_cut = self._r_cut
        s2 = self.sigma * self.sigma
        inv_s2 = 1.0 / s2
        s4 = s2 * s2
        f0 = self.f0
        f2 = f0 * f0
        exp, sqrt = math.exp, math.sqrt

        def rhs(r, y):
            R, P = y
            if r >= r_cut:
                return P / r, r * (m2 / (r * r) - k2) * R
            g = exp(-0.5 * r * r * inv_s2)
            if curved:
                df = f0 * r * inv_s2 * g
                v = 1.0 / sqrt(1.0 + df * df)
            else:
                v = 1.0
            c = m2 / (r * r) - k2
            if with_potential:
                e = g * g
                r2 = r * r
                d = f2 * r2 * e + s4
                c -= 0.25 * f2 * r2 * r2 * e * (f2 * e + s2) ** 2 / (d * d * d)
            return P / (r * v), (r / v) * c * R

        return rhs


def height(profile: SurfaceProfile, r):
    return profile.height(r)


def slope_F(profile: SurfaceProfile, r):
    return profile.slope_F(r)


def curvatures(profile: SurfaceProfile, r):
    return profile.curvatures(r)


def reduced_geo_potential(profile: SurfaceProfile, r):
    return profile.reduced_geo_potential(r)


def potential_minimum(profile: SurfaceProfile):
    """Location and value of the minimum of ``U_geo`` (dense scan, then golden section)."""
    r = np.linspace(0.0, profile.r_cut, 20001)
    U = profile.reduced_geo_potential(r)
    i = int(np.argmin(U))
    lo, hi = r[max(i - 1, 0)], r[min(i + 1, r.size - 1)]
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = profile.reduced_geo_potential(c), profile.reduced_geo_potential(d)
    while b - a > 1e-12 * max(1.0, b):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = profile.reduced_geo_potential(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = profile.reduced_geo_potential(d)
    r_min = 0.5 * (a + b)
    return r_min, profile.reduced_geo_potential(r_min)


def physical_depth_meV(profile: SurfaceProfile, a0_nm: float, mass: float = constants.m_e) -> float:
    """Depth ``max |V_geo|`` in meV for length unit ``a0_nm`` and particle ``mass`` (kg)."""
    if not (a0_nm > 0 and mass > 0):
        raise ValueError("a0 and mass must be positive")
    if profile.is_flat:
        return 0.0
    _, u_min = potential_minimum(profile)
    a0 = a0_nm * 1e-9
    joule = constants.hbar ** 2 / (2.0 * mass) * abs(u_min) / a0 ** 2
    return joule / constants.e * 1e3

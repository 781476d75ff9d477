"""Partial-wave solution of the scattering problem on an axially symmetric surface.

Each angular channel m obeys

    (v/r) d/dr (r v dR/dr) - (m^2 / r^2) R + (k^2 - U) R = 0,

integrated outward as the first-order system in ``(R, P = r v R')``.
Outside the cutoff radius the solution is a real combination of J_m and
Y_m, and the K-matrix element follows from the values at two radii.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numerics import OdeSpec, QuadratureSpec, integrate, jy_table, ode_solve


class PwaError(RuntimeError):
    pass


class Scenario(enum.Enum):
    FULL = "full"
    METRIC_ONLY = "metric-only"
    POTENTIAL_ONLY = "potential-only"
    FLAT = "flat"

    @property
    def curved_metric(self) -> bool:
        return self in (Scenario.FULL, Scenario.METRIC_ONLY)

    @property
    def with_potential(self) -> bool:
        return self in (Scenario.FULL, Scenario.POTENTIAL_ONLY)

    @classmethod
    def parse(cls, value) -> "Scenario":
        if isinstance(value, cls):
            return value
        # accepts "metric-only", "METRIC_ONLY" and "MetricOnly" alike
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for s in cls:
            if s.value.replace("-", "") == key:
                return s
        raise ValueError(f"unknown scenario {value!r}; expected one of {[s.value for s in cls]}")


@dataclass(frozen=True)
class SquareWell:
    """Flat-space disc potential ``U = -depth`` for ``r < radius``.

    Only meaningful with :attr:`Scenario.POTENTIAL_ONLY`; it exists to check
    the solver against the closed-form two-region matching.
    """

    depth: float
    radius: float

    @property
    def r_cut(self) -> float:
        return self.radius

    @property
    def length_scale(self) -> float:
        return self.radius

    @property
    def is_flat(self) -> bool:
        return self.depth == 0.0

    @property
    def breakpoints(self):
        return (self.radius,)

    def radial_coefficients(self, r: float):
        return 1.0, (-self.depth if r < self.radius else 0.0)

    def reduced_geo_potential(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.radius, -self.depth, 0.0)

    def d2height(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def max_abs_potential(self) -> float:
        return abs(self.depth)


@dataclass(frozen=True)
class Radii:
    r1: float
    r2: float

    @staticmethod
    def default(profile, k: float) -> "Radii":
        r1 = profile.r_cut + 2.0 * math.pi / k
        return Radii(r1, r1 + 0.5 * math.pi / k)

    def shifted(self, k: float) -> "Radii":
        q = 0.5 * math.pi / k
        return Radii(self.r1 + q, self.r2 + q)


@dataclass(frozen=True)
class RadialSolution:
    """Samples of the (arbitrarily scaled) regular solution of one channel."""

    k: float
    m: int
    scenario: Scenario
    r_start: float
    r: np.ndarray
    R: np.ndarray
    dR: np.ndarray
    radii: Radii
    R_match: tuple          # R at (r1, r2)
    R_backup: tuple         # R at the quarter-wavelength shifted pair
    n_steps: int


def _coefficients(profile, scenario: Scenario):
    curved, pot = scenario.curved_metric, scenario.with_potential
    coeff = profile.radial_coefficients
    if curved and pot:
        return coeff
    if curved:
        return lambda r: (coeff(r)[0], 0.0)
    if pot:
        return lambda r: (1.0, coeff(r)[1])
    return lambda r: (1.0, 0.0)


def _radial_rhs(profile, scenario: Scenario, k2: float, m2: float):
    fused = getattr(profile, "radial_rhs", None)
    if fused is not None:
        return fused(scenario.curved_metric, scenario.with_potential, k2, m2)
    coeff = _coefficients(profile, scenario)

    def rhs(r, y):
        v, U = coeff(r)
        return (y[1] / (r * v), (r / v) * (m2 / (r * r) - k2 + U) * y[0])

    return rhs


def _start(profile, scenario: Scenario, k: float, m: int, r_cap: float = math.inf):
    """Start radius and initial (R, P) of the regular solution.

    Uses ``R = r^m (1 + c r^2)`` with the second Frobenius coefficient of
    the expanded equation; the overall scale is arbitrary.  For large m
    the start moves out towards the centrifugal turning point so that the
    growth of ``r^m`` stays representable, but never beyond ``r_cap``
    (half the inner matching radius): the irregular admixture from the
    truncated series then decays by at least ``2^(-2m)`` before matching.
    """
    r_min = 1e-6 * profile.length_scale
    coeff = _coefficients(profile, scenario)
    u0 = coeff(0.0)[1]
    if m == 0:
        r_s = r_min
    else:
        u_max = profile.max_abs_potential() if scenario.with_potential else 0.0
        r_turn = m / math.sqrt(k * k + u_max)
        r_s = max(r_min, min(0.5 * r_turn, r_turn * 1e-14 ** (1.0 / (2 * m)), r_cap))
    a2 = float(profile.d2height(np.array([0.0]))[0]) ** 2 if scenario.curved_metric else 0.0
    c = a2 * m / 4.0 - (k * k - u0) / (4.0 * (m + 1))
    v_s = coeff(r_s)[0]
    dlog = m / r_s + 2.0 * c * r_s
    return r_s, 1.0, r_s * v_s * dlog


def solve_radial(profile, scenario, k: float, m: int, *, spec: OdeSpec | None = None,
                 radii: Radii | None = None, samples=None) -> RadialSolution:
    """Integrate the channel-m radial equation from near the origin to past r2."""
    scenario = Scenario.parse(scenario)
    if not k > 0:
        raise ValueError("k must be positive")
    m = abs(int(m))
    spec = spec or OdeSpec()
    radii = radii or Radii.default(profile, k)
    if not (radii.r1 > profile.r_cut and radii.r2 > profile.r_cut and radii.r1 != radii.r2):
        raise ValueError("matching radii must be distinct and outside the cutoff radius")
    backup = radii.shifted(k)
    r_end = max(radii.r2, backup.r2, radii.r1, backup.r1)
    samples = np.asarray(samples if samples is not None else [], dtype=float)
    if samples.size and samples.max() > r_end:
        r_end = float(samples.max())

    coeff = _coefficients(profile, scenario)
    rhs = _radial_rhs(profile, scenario, k * k, float(m * m))

    r_s, R0, P0 = _start(profile, scenario, k, m, 0.5 * min(radii.r1, radii.r2))
    match = np.array([radii.r1, radii.r2, backup.r1, backup.r2])
    inner = samples[samples >= r_s]
    wanted = np.concatenate([match, inner])
    # integrate piecewise across discontinuities of the coefficients
    stops = [b for b in getattr(profile, "breakpoints", ()) if r_s < b < r_end] + [r_end]
    y = (R0, P0)
    lo = r_s
    R_w = np.empty(wanted.size)
    P_w = np.empty(wanted.size)
    n_steps = 0
    for hi in stops:
        sel = (wanted >= lo) & (wanted <= hi)
        res = ode_solve(rhs, y, (lo, hi), spec, dense=wanted[sel])
        R_w[sel] = res.y[:, 0]
        P_w[sel] = res.y[:, 1]
        y = tuple(res.y_end)
        n_steps += res.n_steps
        lo = hi
    v_w = np.array([coeff(float(r))[0] for r in wanted])
    dR_w = P_w / (wanted * v_w)

    R_s = np.zeros(samples.size)
    dR_s = np.zeros(samples.size)
    R_s[samples >= r_s] = R_w[4:]
    dR_s[samples >= r_s] = dR_w[4:]
    below = samples < r_s
    if np.any(below):
        # power-law continuation inside the start radius
        ratio = samples[below] / r_s
        R_s[below] = R0 * ratio ** m
        dR_s[below] = (m * R0 / r_s) * ratio ** (m - 1) if m > 0 else 0.0
    return RadialSolution(k, m, scenario, r_s, samples, R_s, dR_s, radii,
                          (R_w[0], R_w[1]), (R_w[2], R_w[3]), n_steps)


def extract_K(R1: float, R2: float, k: float, m: int, r1: float, r2: float) -> float:
    """K-matrix element from the solution values at two asymptotic radii.

    Implements ``K = (rho J(kr2) - J(kr1)) / (rho Y(kr2) - Y(kr1))`` with
    ``rho = R1 / R2``, multiplied through by R2 so that a node at r2 is
    harmless.  Raises :class:`PwaError` when the denominator vanishes.
    """
    if r1 == r2:
        raise ValueError("matching radii must differ")
    j, y = jy_table(abs(int(m)), np.array([k * r1, k * r2]))
    J1, J2 = j[-1]
    Y1, Y2 = y[-1]
    num = R1 * J2 - R2 * J1
    den = R1 * Y2 - R2 * Y1
    scale = (abs(R1) + abs(R2)) * (abs(Y1) + abs(Y2) + abs(J1) + abs(J2))
    if scale == 0.0 or abs(den) < 1e-10 * scale:
        raise PwaError(f"vanishing denominator in K extraction (m={m}, k={k})")
    return float(num / den)


def kmatrix_from_solution(sol: RadialSolution) -> float:
    try:
        return extract_K(*sol.R_match, sol.k, sol.m, sol.radii.r1, sol.radii.r2)
    except PwaError:
        b = sol.radii.shifted(sol.k)
        return extract_K(*sol.R_backup, sol.k, sol.m, b.r1, b.r2)


def normalisation(sol: RadialSolution, K: float) -> float:
    """Factor mapping the raw solution onto ``J_m(kr) - K Y_m(kr)`` outside the cutoff."""
    r1, r2 = sol.radii.r1, sol.radii.r2
    j, y = jy_table(sol.m, np.array([sol.k * r1, sol.k * r2]))
    target = j[-1] - K * y[-1]
    raw = np.array(sol.R_match)
    i = int(np.argmax(np.abs(raw)))
    return float(target[i] / raw[i])


def kmatrix_integral_check(profile, k: float, m: int, sol: RadialSolution | None = None,
                           scenario=Scenario.POTENTIAL_ONLY,
                           quad: QuadratureSpec | None = None) -> float:
    """K-matrix from the integral of the potential against the regular solution.

    ``K = -(pi/2) k^-1/2 int sqrt(r) U u_m J_m(kr) dr`` with ``u_m`` scaled to
    ``sqrt(kr) (J_m - K Y_m)`` outside the potential (which is
    ``sqrt(r) R`` times ``sqrt(k)`` for the normalised R), so the integral
    reads ``-(pi/2) int r U R J_m(kr) dr``.  Only defined for flat
    kinematics.
    """
    scenario = Scenario.parse(scenario)
    if scenario.curved_metric:
        raise ValueError("integral K-matrix form is only derived for flat-metric scenarios")
    m = abs(int(m))
    if not scenario.with_potential or profile.is_flat:
        return 0.0
    r_cut = profile.r_cut
    breaks = [b for b in getattr(profile, "breakpoints", ()) if 0 < b < r_cut]
    edges = [0.0] + breaks + [r_cut]
    # interior samples on Gauss-Kronrod panels are interpolated from a dense table
    grid = np.linspace(0.0, r_cut, 6001)
    if sol is None or sol.r.size == 0:
        sol = solve_radial(profile, scenario, k, m, samples=grid)
    else:
        grid = sol.r
    K_two_radius = kmatrix_from_solution(sol)
    c = normalisation(sol, K_two_radius)
    R = c * sol.R
    dR = c * sol.dR

    def integrand(r):
        Rr = _hermite(grid, R, dR, r)
        j, _ = jy_table(m, k * r, with_y=False)
        U = np.asarray(profile.reduced_geo_potential(r), dtype=float)
        return r * U * Rr * j[m]

    quad = quad or QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate(integrand, lo, hi, quad)
        total += val
    return -0.5 * math.pi * total


def _hermite(x, y, dy, xq):
    """Piecewise cubic Hermite interpolation of samples (x, y, y')."""
    xq = np.asarray(xq, dtype=float)
    i = np.clip(np.searchsorted(x, xq) - 1, 0, x.size - 2)
    h = x[i + 1] - x[i]
    t = (xq - x[i]) / h
    t2, t3 = t * t, t * t * t
    return ((2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * dy[i]
            + (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * dy[i + 1])


# -- channels ------------------------------------------------------------------


@dataclass(frozen=True)
class ChannelResult:
    k: float
    m: int
    K: float
    delta: float
    S: complex
    sigma: float

    @classmethod
    def from_K(cls, k: float, m: int, K: float) -> "ChannelResult":
        delta = math.atan(K)
        S = complex(1.0, K) / complex(1.0, -K)
        return cls(k, m, K, delta, S, 4.0 / k * math.sin(delta) ** 2)


@dataclass(frozen=True)
class TruncationPolicy:
    delta_floor: float = 1e-8
    n_consecutive: int = 3
    extra_abort: int = 64

    def __post_init__(self):
        if not self.delta_floor > 0 or self.n_consecutive < 1 or self.extra_abort < 1:
            raise ValueError("invalid truncation policy")

    def m_guess(self, profile, k: float) -> int:
        return int(math.ceil(k * profile.r_cut))


def solve_channel(profile, scenario, k: float, m: int, spec: OdeSpec | None = None,
                  radii: Radii | None = None) -> ChannelResult:
    sol = solve_radial(profile, scenario, k, m, spec=spec, radii=radii)
    return ChannelResult.from_K(k, abs(int(m)), kmatrix_from_solution(sol))


@dataclass(frozen=True)
class ChannelSet:
    """Channel results for one k, stored for m >= 0 and mirrored on demand."""

    k: float
    scenario: Scenario
    positive: tuple            # ChannelResult for m = 0..m_max_used
    m_max_used: int = field(default=0)

    @property
    def channels(self) -> list:
        """All channels ordered m = -M..M (delta_{-m} = delta_m)."""
        neg = [ChannelResult(c.k, -c.m, c.K, c.delta, c.S, c.sigma) for c in reversed(self.positive[1:])]
        return neg + list(self.positive)

    def deltas(self) -> np.ndarray:
        return np.array([c.delta for c in self.positive])

    def S_full(self):
        """m values and S-matrix elements over the symmetric range."""
        ch = self.channels
        return np.array([c.m for c in ch]), np.array([c.S for c in ch])


def channel_sweep(profile, scenario, k: float, policy: TruncationPolicy | None = None,
                  spec: OdeSpec | None = None, radii: Radii | None = None,
                  extra_channels: int = 0) -> ChannelSet:
    """Solve channels m = 0, 1, ... until the phase shifts die out.

    Stops once ``m >= ceil(k r_cut)`` and the last ``n_consecutive``
    channels have ``|delta| < delta_floor``; ``extra_channels`` more are
    appended after that for truncation studies.
    """
    scenario = Scenario.parse(scenario)
    policy = policy or TruncationPolicy()
    m_guess = policy.m_guess(profile, k)
    m_abort = m_guess + policy.extra_abort
    results = []
    quiet = 0
    m = 0
    while True:
        if profile.is_flat or scenario is Scenario.FLAT:
            res = ChannelResult.from_K(k, m, 0.0)
        else:
            res = solve_channel(profile, scenario, k, m, spec, radii)
        results.append(res)
        quiet = quiet + 1 if abs(res.delta) < policy.delta_floor else 0
        if m >= m_guess and quiet >= policy.n_consecutive:
            break
        m += 1
        if m > m_abort:
            tail = [f"{c.m}:{c.delta:.2e}" for c in results[-5:]]
            raise PwaError(f"channel sweep did not converge by m = {m_abort} at k = {k}; "
                           f"last phase shifts {tail}")
    for _ in range(extra_channels):
        m += 1
        if profile.is_flat or scenario is Scenario.FLAT:
            results.append(ChannelResult.from_K(k, m, 0.0))
        else:
            results.append(solve_channel(profile, scenario, k, m, spec, radii))
    return ChannelSet(k, scenario, tuple(results), m)


@dataclass(frozen=True)
class CrossLengths:
    k: float
    sigma_tot: float
    sigma_M: float
    partials: np.ndarray        # sigma_m for m = 0..M (per single m, not doubled)
    L_s: float
    m_max_used: int
    sigma_tot_from_S: float     # (1/k) sum |S_m - 1|^2
    sigma_M_from_S: float       # (1/2k) sum |S_{m+1} - S_m|^2


def cross_lengths(channels: ChannelSet) -> CrossLengths:
    """Total and momentum-transfer cross lengths, partials and L_s.

    Sums run over m in Z; channels beyond the computed range contribute
    zero phase shift.
    """
    k = channels.k
    ms, S = channels.S_full()
    deltas = np.array([c.delta for c in channels.channels])
    sigma_tot = 4.0 / k * float(np.sum(np.sin(deltas) ** 2))
    d_ext = np.concatenate([[0.0], deltas, [0.0]])
    sigma_M = 2.0 / k * float(np.sum(np.sin(np.diff(d_ext)) ** 2))
    partials = np.array([c.sigma for c in channels.positive])
    weight = np.abs(S - 1.0) ** 2
    L_s = 0.0 if sigma_tot == 0.0 else float(np.sum(ms * weight)) / (k * sigma_tot)
    S_ext = np.concatenate([[1.0], S, [1.0]])
    return CrossLengths(k, sigma_tot, sigma_M, partials, L_s, channels.m_max_used,
                        float(np.sum(weight)) / k,
                        float(np.sum(np.abs(np.diff(S_ext)) ** 2)) / (2.0 * k))


@dataclass(frozen=True)
class CrossLengthSpectrum:
    scenario: Scenario
    k: np.ndarray
    sigma_tot: np.ndarray
    sigma_M: np.ndarray
    m_max_used: np.ndarray
    L_s: np.ndarray
    partials: tuple             # one array of sigma_m (m >= 0) per k
    phase_shifts: tuple         # one array of delta_m (m >= 0) per k


def _spectrum_point(args):
    profile, scenario, k, policy, spec = args
    ch = channel_sweep(profile, scenario, k, policy, spec)
    return cross_lengths(ch), ch.deltas()


def spectrum(profile, scenario, k_grid, policy: TruncationPolicy | None = None,
             spec: OdeSpec | None = None, jobs: int = 1) -> CrossLengthSpectrum:
    """Cross lengths over a k-grid; ``jobs > 1`` maps over k in worker processes."""
    scenario = Scenario.parse(scenario)
    k_grid = np.asarray(k_grid, dtype=float)
    work = [(profile, scenario, float(k), policy, spec) for k in k_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_spectrum_point, work))
    else:
        out = [_spectrum_point(w) for w in work]
    cls = [o[0] for o in out]
    return CrossLengthSpectrum(
        scenario=scenario,
        k=k_grid,
        sigma_tot=np.array([c.sigma_tot for c in cls]),
        sigma_M=np.array([c.sigma_M for c in cls]),
        m_max_used=np.array([c.m_max_used for c in cls]),
        L_s=np.array([c.L_s for c in cls]),
        partials=tuple(c.partials for c in cls),
        phase_shifts=tuple(o[1] for o in out),
    )


def default_k_grid(k_min: float = 0.02, k_max: float = 10.0, count: int = 400, log: bool = True):
    if log:
        return np.geomspace(k_min, k_max, count)
    return np.linspace(k_min, k_max, count)

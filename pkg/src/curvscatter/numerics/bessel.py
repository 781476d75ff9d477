"""Integer-order cylinder functions J_m and Y_m for real arguments.

J is obtained by Miller's downward recurrence normalised with the
Neumann sum ``J_0 + 2 sum J_2k = 1``; tiny arguments, where the
recurrence would overflow, use the ascending series instead.  Y_0 and Y_1 come from Neumann
series over the same unnormalised sequence for moderate arguments and
from Hankel's asymptotic expansion for large ones; higher orders follow
by upward recurrence, which is stable for Y.
"""

from __future__ import annotations

import math

import numpy as np

M_MAX = 200
X_MAX = 2000.0

_EULER_GAMMA = 0.57721566490153286061
_HANKEL_SWITCH = 25.0
_RESCALE_AT = 1e250
# below this the ascending series converges within three terms
_SERIES_SWITCH = 1e-3


class BesselDomainError(ValueError):
    pass


def _check(m: int, x: np.ndarray, *, allow_zero: bool) -> None:
    if int(m) != m or m < 0 or m > M_MAX:
        raise BesselDomainError(f"order must be an integer in [0, {M_MAX}], got {m}")
    if np.any(~np.isfinite(x)) or np.any(x > X_MAX):
        raise BesselDomainError(f"argument must be finite and <= {X_MAX}")
    if allow_zero:
        if np.any(x < 0):
            raise BesselDomainError("argument must be non-negative")
    elif np.any(x <= 0):
        raise BesselDomainError("Y_m is singular at x <= 0")


def _miller_start(m_max: int, x_max: float) -> int:
    n = max(m_max, x_max) + 8.0 * max(x_max, 1.0) ** (1.0 / 3.0) + 30.0
    n = int(math.ceil(n))
    return n + (n % 2)


def _miller(m_max: int, x: np.ndarray):
    """Unnormalised downward recurrence.

    Returns (table, norm, odd_sum, even_sum) where ``table[m] / norm = J_m``
    for m <= m_max, ``even_sum = sum_k (-1)^k f_2k / k`` and
    ``odd_sum = sum_k (-1)^k (f_{2k-1} - f_{2k+1}) / k``, the pieces of the
    Neumann series for Y_0 and Y_1.  ``x`` must be strictly positive.
    """
    n_start = _miller_start(m_max, float(np.max(x)))
    two_over_x = 2.0 / x
    table = np.zeros((m_max + 1, x.size))
    f_next = np.zeros_like(x)  # f_{n+1}
    f_cur = np.full_like(x, 1e-30)  # f_n
    norm = np.zeros_like(x)
    even_sum = np.zeros_like(x)
    odd_sum = np.zeros_like(x)
    for n in range(n_start, 0, -1):
        if n <= m_max:
            table[n] = f_cur
        if n % 2 == 0:
            norm += 2.0 * f_cur
            even_sum += (-1.0) ** (n // 2) * f_cur / (n // 2)
        else:
            # contributes to k = (n+1)/2 via f_{2k-1}, and to k = (n-1)/2 via f_{2k+1}
            k_up = (n + 1) // 2
            odd_sum += (-1.0) ** k_up * f_cur / k_up
            k_dn = (n - 1) // 2
            if k_dn >= 1:
                odd_sum -= (-1.0) ** k_dn * f_cur / k_dn
        f_prev = n * two_over_x * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        big = np.abs(f_cur) > _RESCALE_AT
        if np.any(big):
            s = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            f_cur *= s
            f_next *= s
            norm *= s
            even_sum *= s
            odd_sum *= s
            table *= s
    # f_cur is now f_0
    table[0] = f_cur
    norm += f_cur
    return table, norm, odd_sum, even_sum


def _hankel_pq(nu: int, x: np.ndarray):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for j in range(1, 80):
        term = term * (mu - (2 * j - 1) ** 2) / (j * 8.0 * x)
        if j % 2 == 1:
            q += (-1.0) ** ((j - 1) // 2) * term
        else:
            p += (-1.0) ** (j // 2) * term
        if np.all(np.abs(term) < 1e-17):
            break
    return p, q


def _hankel_jy(nu: int, x: np.ndarray):
    p, q = _hankel_pq(nu, x)
    phase = x - (0.5 * nu + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    c, s = np.cos(phase), np.sin(phase)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _upward(y: np.ndarray, x: np.ndarray, m_max: int) -> None:
    """Fill ``y[2..m_max]`` by upward recurrence; overflow saturates at -inf."""
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, m_max):
            y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1]
    y[np.isnan(y)] = -np.inf


def _series_jy(m_max: int, x: np.ndarray, with_y: bool):
    """Ascending series for ``0 < x < _SERIES_SWITCH``."""
    q = -0.25 * x * x
    log_half = np.log(x) - math.log(2.0)
    top = max(m_max, 1)
    j = np.empty((top + 1, x.size))
    for m in range(top + 1):
        lead = np.exp(m * log_half - math.lgamma(m + 1))
        j[m] = lead * (1.0 + q / (m + 1) * (1.0 + q / (2 * (m + 2))))
    if not with_y:
        return j[: m_max + 1], None
    g = log_half + _EULER_GAMMA
    # Y_0 = (2/pi)[g J_0 + sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2]
    y0 = (2.0 / math.pi) * (g * j[0] - q * (1.0 + 0.375 * q))
    # Y_1 = -2/(pi x) + (x/pi)(g - 1/2) + O(x^3 log x)
    y1 = -2.0 / (math.pi * x) + (2.0 / math.pi) * log_half * j[1] \
        - x / (2.0 * math.pi) * ((1.0 - 2.0 * _EULER_GAMMA) + q * (2.5 - 2.0 * _EULER_GAMMA) / 2.0)
    y = np.empty_like(j)
    y[0] = y0
    y[1] = y1
    _upward(y, x, m_max)
    return j[: m_max + 1], y[: m_max + 1]


def jy_table(m_max: int, x, *, with_y: bool = True):
    """All orders 0..m_max of J (and Y) at the points ``x``.

    Returns arrays of shape ``(m_max + 1,) + x.shape``; ``Y`` is ``None``
    when ``with_y`` is false.  Points with ``x == 0`` are allowed only
    without Y.
    """
    x = np.asarray(x, dtype=float)
    shape = x.shape
    xf = x.ravel()
    _check(m_max, xf, allow_zero=not with_y)
    j = np.zeros((m_max + 1, xf.size))
    y = np.zeros((m_max + 1, xf.size)) if with_y else None
    zero = xf == 0.0
    j[0, zero] = 1.0
    tiny = (xf > 0.0) & (xf < _SERIES_SWITCH)
    if np.any(tiny):
        with np.errstate(over="ignore"):
            jt, yt = _series_jy(m_max, xf[tiny], with_y)
        j[:, tiny] = jt
        if with_y:
            y[:, tiny] = yt
    pos = xf >= _SERIES_SWITCH
    if np.any(pos):
        xp = xf[pos]
        table, norm, odd_sum, even_sum = _miller(max(m_max, 1), xp)
        jp = table / norm
        j[:, pos] = jp[: m_max + 1]
        if with_y:
            y0 = np.empty_like(xp)
            y1 = np.empty_like(xp)
            small = xp <= _HANKEL_SWITCH
            if np.any(small):
                xs = xp[small]
                lg = np.log(0.5 * xs) + _EULER_GAMMA
                y0[small] = (2.0 / math.pi) * (lg * jp[0, small] - 2.0 * even_sum[small] / norm[small])
                y1[small] = (2.0 / math.pi) * (lg * jp[1, small] - jp[0, small] / xs
                                               + odd_sum[small] / norm[small])
            large = ~small
            if np.any(large):
                xl = xp[large]
                _, y0[large] = _hankel_jy(0, xl)
                _, y1[large] = _hankel_jy(1, xl)
            yp = np.empty((m_max + 1, xp.size))
            yp[0] = y0
            if m_max >= 1:
                yp[1] = y1
            _upward(yp, xp, m_max)
            y[:, pos] = yp
    j = j.reshape((m_max + 1,) + shape)
    if with_y:
        y = y.reshape((m_max + 1,) + shape)
    return j, y


def bessel_j(m: int, x):
    """J_m(x) for integer 0 <= m <= 200 and 0 <= x <= 2000."""
    arr = np.asarray(x, dtype=float)
    _check(m, arr.ravel(), allow_zero=True)
    j, _ = jy_table(int(m), arr, with_y=False)
    out = j[int(m)]
    return float(out) if np.ndim(x) == 0 else out


def bessel_y(m: int, x):
    """Y_m(x) for integer 0 <= m <= 200 and 0 < x <= 2000."""
    arr = np.asarray(x, dtype=float)
    _check(m, arr.ravel(), allow_zero=False)
    _, y = jy_table(int(m), arr)
    out = y[int(m)]
    return float(out) if np.ndim(x) == 0 else out


def j1_over_x(x):
    """J_1(x)/x, regular at the origin (limit 1/2)."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    x2 = xs * xs
    out[small] = 0.5 - x2 / 16.0 + x2 * x2 / 384.0
    if np.any(~small):
        j, _ = jy_table(1, np.abs(x[~small]), with_y=False)
        out[~small] = j[1] / np.abs(x[~small])
    return out

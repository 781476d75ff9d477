"""Dormand-Prince 5(4) integrator with step rejection and dense output."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th and embedded 4th order weights
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# coefficients of the continuous extension, y(t + x h) = y + h K^T P [x, x^2, x^3, x^4]
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class OdeError(RuntimeError):
    pass


@dataclass(frozen=True)
class OdeSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    initial_step: float | None = None
    max_steps: int = 200_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("ODE tolerances must be positive")
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    def tightened(self, factor: float) -> "OdeSpec":
        return OdeSpec(self.rel_tol / factor, self.abs_tol / factor, self.initial_step, self.max_steps)


@dataclass(frozen=True)
class OdeResult:
    t: np.ndarray          # requested sample points
    y: np.ndarray          # shape (len(t), dim)
    dydt: np.ndarray       # derivative at the samples, same shape
    y_end: np.ndarray
    n_steps: int
    n_rejected: int


def _initial_step(rhs, t0, y0, f0, direction_span, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, direction_span)
    y1 = y0 + h0 * f0
    f1 = np.asarray(rhs(t0 + h0, y1), dtype=float)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, direction_span)


def ode_solve(rhs, y0, r_span, spec: OdeSpec | None = None, dense=()) -> OdeResult:
    """Integrate ``y' = rhs(r, y)`` from ``r_span[0]`` to ``r_span[1]``.

    ``rhs`` receives the state as a list of floats and returns a sequence
    of the same length.  ``dense`` lists radii inside the span where the
    solution and its derivative are sampled through the continuous
    extension of the method.
    """
    spec = spec or OdeSpec()
    t0, t1 = float(r_span[0]), float(r_span[1])
    if not t0 < t1:
        raise ValueError(f"need r0 < r1, got {r_span}")
    t_eval = np.asarray(dense, dtype=float).ravel()
    if t_eval.size and (np.any(t_eval < t0) or np.any(t_eval > t1)):
        raise ValueError("dense sample points must lie inside the span")
    order = np.argsort(t_eval, kind="stable")
    ts = t_eval[order].tolist()
    y = [float(v) for v in np.ravel(y0)]
    dim = len(y)
    ys = np.empty((len(ts), dim))
    dys = np.empty((len(ts), dim))

    f = [float(v) for v in rhs(t0, y)]
    if spec.initial_step is not None:
        h = min(spec.initial_step, t1 - t0)
    else:
        h = _initial_step(rhs, t0, np.array(y), np.array(f), t1 - t0, spec.rel_tol, spec.abs_tol)
    t = t0
    i_next = 0
    while i_next < len(ts) and ts[i_next] <= t0:
        ys[i_next] = y
        dys[i_next] = f
        i_next += 1

    if dim == 2:
        t, y, n_steps, n_rej = _march2(rhs, t, t1, y, f, h, spec, ts, i_next, ys, dys)
    else:
        t, y, n_steps, n_rej = _march(rhs, t, t1, y, f, h, spec, ts, i_next, ys, dys)
    out_y = np.empty_like(ys)
    out_dy = np.empty_like(dys)
    out_y[order] = ys
    out_dy[order] = dys
    return OdeResult(t_eval, out_y, out_dy, np.array(y), n_steps, n_rej)


def _dense_fill(K, y, t, h, t_new, ts, i_next, ys, dys):
    q = np.asarray(K, dtype=float).T @ _P
    yv = np.asarray(y, dtype=float)
    while i_next < len(ts) and ts[i_next] <= t_new:
        x = (ts[i_next] - t) / h
        ys[i_next] = yv + h * (q @ np.array([x, x * x, x ** 3, x ** 4]))
        dys[i_next] = q @ np.array([1.0, 2 * x, 3 * x * x, 4 * x ** 3])
        i_next += 1
    return i_next


def _march(rhs, t, t1, y, f, h, spec, ts, i_next, ys, dys):
    dim = len(y)
    idx = range(dim)
    rtol, atol = spec.rel_tol, spec.abs_tol
    a1, a2, a3, a4, a5 = _A[1:6]
    b = _B.tolist()
    e = _E.tolist()
    c = _C
    n_steps = n_rej = 0
    while t < t1:
        if n_steps + n_rej >= spec.max_steps:
            raise OdeError(f"step budget {spec.max_steps} exhausted at r = {t}")
        last = t + h >= t1 or (t1 - (t + h)) < 1e-12 * abs(t1)
        if last:
            h = t1 - t
        k1 = f
        k2 = rhs(t + c[1] * h, [y[i] + h * a1[0] * k1[i] for i in idx])
        k3 = rhs(t + c[2] * h, [y[i] + h * (a2[0] * k1[i] + a2[1] * k2[i]) for i in idx])
        k4 = rhs(t + c[3] * h, [y[i] + h * (a3[0] * k1[i] + a3[1] * k2[i] + a3[2] * k3[i])
                                for i in idx])
        k5 = rhs(t + c[4] * h, [y[i] + h * (a4[0] * k1[i] + a4[1] * k2[i] + a4[2] * k3[i]
                                            + a4[3] * k4[i]) for i in idx])
        k6 = rhs(t + h, [y[i] + h * (a5[0] * k1[i] + a5[1] * k2[i] + a5[2] * k3[i]
                                     + a5[3] * k4[i] + a5[4] * k5[i]) for i in idx])
        y_new = [y[i] + h * (b[0] * k1[i] + b[2] * k3[i] + b[3] * k4[i] + b[4] * k5[i]
                             + b[5] * k6[i]) for i in idx]
        k7 = rhs(t + h, y_new)
        en2 = 0.0
        for i in idx:
            err = h * (e[0] * k1[i] + e[2] * k3[i] + e[3] * k4[i] + e[4] * k5[i]
                       + e[5] * k6[i] + e[6] * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            en2 += (err / sc) ** 2
        en = math.sqrt(en2 / dim)
        if not math.isfinite(en) or not all(math.isfinite(v) for v in y_new):
            raise OdeError(f"non-finite state near r = {t}")
        if en <= 1.0:
            t_new = t1 if last else t + h
            if i_next < len(ts) and ts[i_next] <= t_new:
                i_next = _dense_fill([k1, k2, k3, k4, k5, k6, k7], y, t, h, t_new, ts, i_next, ys, dys)
            t, y, f = t_new, y_new, [float(v) for v in k7]
            n_steps += 1
            fac = 0.9 * en ** -0.2 if en > 0 else 5.0
            h = h * min(5.0, max(0.2, fac))
        else:
            n_rej += 1
            h = h * max(0.2, 0.9 * en ** -0.2)
            if h < 1e-14 * max(abs(t), 1.0):
                raise OdeError(f"step size underflow at r = {t}")
    return t, y, n_steps, n_rej


def _march2(rhs, t, t1, y, f, h, spec, ts, i_next, ys, dys):
    """Two-component specialisation of :func:`_march`; same arithmetic, unrolled."""
    rtol, atol = spec.rel_tol, spec.abs_tol
    max_steps = spec.max_steps
    c2, c3, c4, c5 = _C[1:5]
    (a21,), (a31, a32), (a41, a42, a43), (a51, a52, a53, a54), (a61, a62, a63, a64, a65) = _A[1:6]
    b1, _, b3, b4, b5, b6, _ = _B.tolist()
    e1, _, e3, e4, e5, e6, e7 = _E.tolist()
    n_ts = len(ts)
    y0, y1 = y
    p1, q1 = f
    n_steps = n_rej = 0
    while t < t1:
        if n_steps + n_rej >= max_steps:
            raise OdeError(f"step budget {max_steps} exhausted at r = {t}")
        last = t + h >= t1 or (t1 - (t + h)) < 1e-12 * abs(t1)
        if last:
            h = t1 - t
        p2, q2 = rhs(t + c2 * h, (y0 + h * a21 * p1, y1 + h * a21 * q1))
        p3, q3 = rhs(t + c3 * h, (y0 + h * (a31 * p1 + a32 * p2), y1 + h * (a31 * q1 + a32 * q2)))
        p4, q4 = rhs(t + c4 * h, (y0 + h * (a41 * p1 + a42 * p2 + a43 * p3),
                                  y1 + h * (a41 * q1 + a42 * q2 + a43 * q3)))
        p5, q5 = rhs(t + c5 * h, (y0 + h * (a51 * p1 + a52 * p2 + a53 * p3 + a54 * p4),
                                  y1 + h * (a51 * q1 + a52 * q2 + a53 * q3 + a54 * q4)))
        p6, q6 = rhs(t + h, (y0 + h * (a61 * p1 + a62 * p2 + a63 * p3 + a64 * p4 + a65 * p5),
                             y1 + h * (a61 * q1 + a62 * q2 + a63 * q3 + a64 * q4 + a65 * q5)))
        n0 = y0 + h * (b1 * p1 + b3 * p3 + b4 * p4 + b5 * p5 + b6 * p6)
        n1 = y1 + h * (b1 * q1 + b3 * q3 + b4 * q4 + b5 * q5 + b6 * q6)
        p7, q7 = rhs(t + h, (n0, n1))
        err0 = h * (e1 * p1 + e3 * p3 + e4 * p4 + e5 * p5 + e6 * p6 + e7 * p7)
        err1 = h * (e1 * q1 + e3 * q3 + e4 * q4 + e5 * q5 + e6 * q6 + e7 * q7)
        s0 = err0 / (atol + rtol * max(abs(y0), abs(n0)))
        s1 = err1 / (atol + rtol * max(abs(y1), abs(n1)))
        en = math.sqrt(0.5 * (s0 * s0 + s1 * s1))
        if not (math.isfinite(en) and math.isfinite(n0) and math.isfinite(n1)):
            raise OdeError(f"non-finite state near r = {t}")
        if en <= 1.0:
            t_new = t1 if last else t + h
            if i_next < n_ts and ts[i_next] <= t_new:
                K = [(p1, q1), (p2, q2), (p3, q3), (p4, q4), (p5, q5), (p6, q6), (p7, q7)]
                i_next = _dense_fill(K, (y0, y1), t, h, t_new, ts, i_next, ys, dys)
            t, y0, y1, p1, q1 = t_new, n0, n1, float(p7), float(q7)
            n_steps += 1
            fac = 0.9 * en ** -0.2 if en > 0 else 5.0
            h = h * min(5.0, max(0.2, fac))
        else:
            n_rej += 1
            h = h * max(0.2, 0.9 * en ** -0.2)
            if h < 1e-14 * max(abs(t), 1.0):
                raise OdeError(f"step size underflow at r = {t}")
    return t, [y0, y1], n_steps, n_rej

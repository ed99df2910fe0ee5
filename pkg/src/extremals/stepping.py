"""Adaptive embedded Runge-Kutta stepping with projection and event location.

A plain Dormand-Prince 5(4) pair. Compared to a library solver this keeps
three things under direct control: a per-step projection hook (used to pin
sphere coordinates back to unit norm while measuring the drift), terminal
events located by deterministic bisection on re-taken partial steps, and
exact landing on requested sample times so trajectory comparisons never
interpolate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError

__all__ = ["Event", "RKResult", "adaptive_rk"]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


@dataclass
class Event:
    """Terminal event g(t, y) = 0 crossed in the given direction.

    direction -1 fires on g passing from positive to nonpositive, +1 on the
    opposite crossing, 0 on any sign change. ``tol`` is the absolute value of
    g accepted by the bisection.
    """

    fn: object
    direction: int = -1
    tol: float = 1e-12


@dataclass
class RKResult:
    status: str  # "finished" | "event" | "stopped"
    t: float
    y: np.ndarray
    n_steps: int
    n_evals: int
    event: int | None = None


def _rk_step(f, t, y, h, k1=None):
    with np.errstate(all="ignore"):
        k = np.empty((7, y.size))
        k[0] = f(t, y) if k1 is None else k1
        for i in range(1, 7):
            acc = _A[i][0] * k[0]
            for j in range(1, i):
                acc = acc + _A[i][j] * k[j]
            k[i] = f(t + _C[i] * h, y + h * acc)
        y1 = y + h * (_B5 @ k)
        err = h * (_E @ k)
    return y1, err, k


def _error_norm(y0, y1, err, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    with np.errstate(all="ignore"):
        val = float(np.sqrt(np.mean((err / scale) ** 2)))
    return val if np.isfinite(val) else np.inf


def _initial_step(f, t0, y0, f0, direction, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return min(h, 0.1 * span)


def _crossed(g0, g1, direction):
    if direction <= 0 and g0 > 0.0 >= g1:
        return True
    if direction >= 0 and g0 < 0.0 <= g1:
        return True
    return False


def adaptive_rk(f, t0, y0, t_end, *, rtol=1e-8, atol=1e-10, max_step=np.inf,
                first_step=None, project=None, on_step=None, events=(),
                t_stops=(), h_limit=None, max_steps=2_000_000):
    """Integrate y' = f(t, y) from t0 to t_end (either direction).

    project(y) -> y is applied to every accepted state. on_step(t, y) is
    called at each accepted point (including t0) and may return False to stop.
    Times in t_stops are landed on exactly. Events are terminal; the earliest
    crossing inside a step is located by bisection over re-taken partial
    steps, which keeps the result deterministic for fixed inputs.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    t_end = float(t_end)
    span = abs(t_end - t0)
    direction = 1.0 if t_end >= t0 else -1.0
    if project is not None:
        y = project(y)
    if on_step is not None and on_step(t, y) is False:
        return RKResult("stopped", t, y, 0, 0)
    if span == 0.0:
        return RKResult("finished", t, y, 0, 0)

    stops = [s for s in sorted(t_stops, reverse=direction < 0)
             if direction * (s - t0) > 0 and direction * (t_end - s) > 0]
    stop_idx = 0

    n_evals = 0

    def rhs(tt, yy):
        nonlocal n_evals
        n_evals += 1
        return np.asarray(f(tt, yy), dtype=float)

    f0 = rhs(t, y)
    prev_g = [ev.fn(t, y) for ev in events]
    h = first_step if first_step is not None else _initial_step(
        rhs, t, y, f0, direction, rtol, atol, span)
    h = min(h, max_step)
    k1 = f0
    n_steps = 0

    while True:
        if direction * (t_end - t) <= 0:
            return RKResult("finished", t, y, n_steps, n_evals)
        if n_steps >= max_steps:
            raise IntegrationError(f"step budget {max_steps} exceeded at t = {t}")

        h_max_here = min(max_step, abs(t_end - t))
        if h_limit is not None:
            h_max_here = min(h_max_here, h_limit(t, y))
        h_try = min(h, h_max_here)
        while True:
            hit_stop = False
            if stop_idx < len(stops):
                gap = abs(stops[stop_idx] - t)
                if h_try >= gap:
                    h_try = gap
                    hit_stop = True
            y1, err, k = _rk_step(rhs, t, y, direction * h_try, k1)
            enorm = _error_norm(y, y1, err, rtol, atol)
            if enorm <= 1.0:
                break
            h_try *= max(0.2, 0.9 * enorm ** -0.2)
            if h_try < 1e-14 * max(1.0, abs(t)):
                raise IntegrationError(f"step size underflow at t = {t}")
        n_steps += 1
        if hit_stop:
            t1 = stops[stop_idx]
        elif h_try >= abs(t_end - t):
            t1 = t_end
        else:
            t1 = t + direction * h_try
        if project is not None:
            y1 = project(y1)

        located = None
        for idx, ev in enumerate(events):
            g1 = ev.fn(t1, y1)
            if _crossed(prev_g[idx], g1, ev.direction):
                lo, hi = 0.0, 1.0
                y_hi = y1
                for _ in range(100):
                    mid = 0.5 * (lo + hi)
                    ym = _rk_step(rhs, t, y, direction * h_try * mid)[0]
                    if project is not None:
                        ym = project(ym)
                    gm = ev.fn(t + direction * h_try * mid, ym)
                    if abs(gm) <= ev.tol:
                        hi, y_hi = mid, ym
                        break
                    if _crossed(prev_g[idx], gm, ev.direction):
                        hi, y_hi = mid, ym
                    else:
                        lo = mid
                    if hi - lo < 1e-15:
                        break
                theta = hi
                if located is None or theta < located[0]:
                    located = (theta, idx, y_hi)
            prev_g[idx] = g1
        if located is not None:
            theta, idx, y_ev = located
            t_ev = t + direction * h_try * theta
            if on_step is not None:
                on_step(t_ev, y_ev)
            return RKResult("event", t_ev, y_ev, n_steps, n_evals, event=idx)

        if hit_stop:
            stop_idx += 1
        if on_step is not None and on_step(t1, y1) is False:
            return RKResult("stopped", t1, y1, n_steps, n_evals)
        t, y = t1, y1
        k1 = k[6] if project is None else None
        factor = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
        h = min(h_try * factor, max_step)

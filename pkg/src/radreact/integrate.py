"""Adaptive embedded Runge-Kutta 5(4) with dense output.

Dormand-Prince coefficients; the 5th-order solution propagates and the
embedded 4th-order difference drives step control.  Accepted steps carry the
RHS value, so dense output is cubic Hermite on the accepted knots.  A
per-accepted-step monitor hook supports runaway/collision detection and
history recording without touching the stepper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import StepSizeUnderflowError

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_ERR = _B5 - _B4


@dataclass(frozen=True)
class StepControls:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    first_step: float | None = None
    max_steps: int = 5_000_000

    def with_(self, **kw):
        return replace(self, **kw)


class StopIntegration(Exception):
    """Raised by a monitor to end the run; carries a reason tag."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class OdeSolution:
    """Accepted knots (t, y, f) plus cubic-Hermite evaluation between them."""

    t: np.ndarray          # shape (n,)
    y: np.ndarray          # shape (n, dim)
    f: np.ndarray          # shape (n, dim)
    stop_reason: str | None = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        idx = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.t) - 2)
        t0 = self.t[idx]
        h = self.t[idx + 1] - t0
        s = np.where(h != 0.0, (tq - t0) / np.where(h == 0.0, 1.0, h), 0.0)
        s = s[:, None]
        h = h[:, None]
        y0 = self.y[idx]
        y1 = self.y[idx + 1]
        f0 = self.f[idx]
        f1 = self.f[idx + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        out = h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
        return out[0] if scalar else out


def _error_norm(err, y_old, y_new, controls):
    scale = controls.atol + controls.rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return math.sqrt(float(np.mean((err / scale) ** 2)))


def _initial_step(fun, t0, y0, f0, t_end, controls):
    if controls.first_step is not None:
        return min(controls.first_step, abs(t_end - t0))
    scale = controls.atol + controls.rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = fun(t0 + h0, y1)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, abs(t_end - t0), controls.max_step)


def solve_rk45(fun, t0, y0, t_end, controls: StepControls = StepControls(),
               monitor=None) -> OdeSolution:
    """Integrate y' = fun(t, y) from t0 to t_end (t_end > t0).

    monitor(t, y, f) is called after every accepted step; it may raise
    StopIntegration to end the run early (the offending state is kept).
    """
    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    f = np.asarray(fun(t, y), dtype=float)
    ts = [t]
    ys = [y.copy()]
    fs = [f.copy()]
    stop_reason = None
    if monitor is not None:
        try:
            monitor(t, y, f)
        except StopIntegration as stop:
            return OdeSolution(np.array(ts), np.array(ys), np.array(fs), stop.reason)

    h = _initial_step(fun, t, y, f, t_end, controls)
    k = np.empty((7, y.size))
    norm_prev = 1.0
    for _ in range(controls.max_steps):
        if t >= t_end:
            break
        h = min(h, t_end - t, controls.max_step)
        if h <= 1e-14 * max(abs(t), 1.0):
            raise StepSizeUnderflowError(f"step size underflow at t = {t}")
        k[0] = f
        for i in range(1, 7):
            yi = y + h * (k[:i].T @ _A[i])
            k[i] = fun(t + _C[i] * h, yi)
        y_new = y + h * (k.T @ _B5)
        err = h * (k.T @ _ERR)
        norm = _error_norm(err, y, y_new, controls)
        if norm <= 1.0:
            t += h
            y = y_new
            f = k[6].copy()   # FSAL: last stage equals f at the new point
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
            if monitor is not None:
                try:
                    monitor(t, y, f)
                except StopIntegration as stop:
                    stop_reason = stop.reason
                    break
            # PI controller: damps the accept/reject limit cycle near the
            # stability boundary of the stiff off-manifold direction
            if norm == 0.0:
                factor = 5.0
            else:
                factor = min(5.0, 0.9 * norm ** -0.14 * norm_prev ** 0.08)
            norm_prev = max(norm, 1e-10)
        else:
            factor = max(0.2, 0.9 * norm ** -0.2)
        h *= factor
    else:
        raise StepSizeUnderflowError("max_steps exceeded")
    return OdeSolution(np.array(ts), np.array(ys), np.array(fs), stop_reason)


def rk4_fixed(fun, t0, y0, t_end, n_steps: int):
    """Classical RK4 with n_steps uniform steps; returns knots (t, y, f)."""
    h = (t_end - t0) / n_steps
    t = float(t0)
    y = np.asarray(y0, dtype=float).copy()
    ts = [t]
    ys = [y.copy()]
    fs = [np.asarray(fun(t, y), dtype=float)]
    for _ in range(n_steps):
        k1 = fs[-1]
        k2 = np.asarray(fun(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(fun(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(fun(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        ts.append(t)
        ys.append(y.copy())
        fs.append(np.asarray(fun(t, y), dtype=float))
    return np.array(ts), np.array(ys), np.array(fs)

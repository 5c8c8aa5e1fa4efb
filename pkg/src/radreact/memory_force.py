"""Rigid-charge self-force memory kernels and the delay equation of motion.

The extended charge remembers its own velocity one light-crossing back: for
the charged shell the self-force reduces to a single constant lag 2 R, giving
a differential-difference equation.  Taylor expansion of the lag trades the
memory for a renormalized mass plus the point-charge jerk term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PhysicsError, VelocityGuardError
from .fields import FieldMap
from .integrate import rk4_fixed
from .lorentz_dirac import Trajectory
from .units import ChargeModel, SphereShell, UniformBall


@dataclass(frozen=True)
class MemoryKernel:
    """Angle-integrated self-interaction kernel of a rigid form factor."""

    model: ChargeModel

    def __post_init__(self):
        if not isinstance(self.model.form_factor, (SphereShell, UniformBall)):
            raise PhysicsError("memory kernel needs an extended form factor")

    @property
    def radius(self) -> float:
        return self.model.form_factor.radius

    @property
    def support(self) -> float:
        """h vanishes beyond |w| = 2 R."""
        return 2.0 * self.radius

    def h(self, w: float) -> float:
        R = self.radius
        e2 = self.model.e**2
        aw = abs(w)
        if aw >= 2.0 * R:
            return 0.0
        if isinstance(self.model.form_factor, SphereShell):
            return e2 / (8.0 * math.pi * R) * (1.0 - aw / (2.0 * R))
        return e2 / (8.0 * math.pi * R) * 1.125 * _tent_self_convolution(aw / R)

    def w_t(self, x: float, t: float) -> float:
        """Propagated kernel |x|^-1 (h(|x| + t) - h(|x| - t))."""
        ax = abs(x)
        if ax < 1e-9 * self.radius:
            # x -> 0 limit is 2 h'(t); a tiny centered difference is exact to O(x^2)
            ax = 1e-6 * self.radius
        return (self.h(ax + t) - self.h(ax - t)) / ax

    def h_integral_quadrature(self, rtol: float = 1e-9) -> float:
        """int h(w) dw by integrating the closed form over its support."""
        from scipy import integrate as sp_integrate
        val, _ = sp_integrate.quad(self.h, -self.support, self.support,
                                   epsabs=0.0, epsrel=rtol, limit=200,
                                   points=[0.0])
        return val

    def h_integral_from_formfactor(self, rtol: float = 1e-9) -> float:
        """Independent oracle: int h dw = 4 pi int_0^inf g(k) sin(2Rk)/k dk."""
        from scipy import integrate as sp_integrate
        e2 = self.model.e**2
        ff = self.model.form_factor
        R = self.radius
        coeff = 4.0 * math.pi * e2 / (2.0 * math.pi) ** 3

        def integrand(k):
            f = ff.fourier(k)
            return coeff * f * f * math.sin(2.0 * R * k) / k

        A = 60.0 / R
        head, _ = sp_integrate.quad(integrand, 1e-300, A, epsabs=0.0,
                                    epsrel=rtol, limit=2000)
        if isinstance(ff, SphereShell):
            # sin^2(kR) sin(2kR) = sin(2kR)/2 - sin(4kR)/4 on a k^-3 envelope
            t1, _ = sp_integrate.quad(lambda k: coeff / (2.0 * R * R * k**3),
                                      A, np.inf, weight="sin", wvar=2.0 * R)
            t2, _ = sp_integrate.quad(lambda k: -coeff / (4.0 * R * R * k**3),
                                      A, np.inf, weight="sin", wvar=4.0 * R)
            tail = t1 + t2
        else:
            tail, _ = sp_integrate.quad(integrand, A, 16.0 * A, limit=4000)
        return head + tail

    def h_from_formfactor_quadrature(self, w: float, rtol: float = 1e-9) -> float:
        """Independent oracle: h(w) = 2 pi int_0^inf |rho-hat(k)|^2 cos(kw) dk."""
        from scipy import integrate as sp_integrate
        e2 = self.model.e**2
        ff = self.model.form_factor

        def integrand(k):
            f = ff.fourier(k)
            return 2.0 * math.pi * e2 * f * f / (2.0 * math.pi) ** 3 * math.cos(k * w)

        R = self.radius
        A = 60.0 / R
        head, _ = sp_integrate.quad(integrand, 0.0, A, epsabs=0.0, epsrel=rtol,
                                    limit=2000)
        # oscillatory tail: F^2 cos(kw) decays as k^-2 (shell) / k^-4 (ball)
        tails = 0.0
        coeff = 2.0 * math.pi * e2 / (2.0 * math.pi) ** 3
        if isinstance(ff, SphereShell):
            # sin^2(kR) cos(kw) = [cos(kw)/2 - (cos(k(2R+w)) + cos(k(2R-w)))/4]
            def pw(k):
                return coeff / (2.0 * R * R * k * k)
            t1, _ = sp_integrate.quad(pw, A, np.inf, weight="cos", wvar=w) \
                if w != 0.0 else sp_integrate.quad(pw, A, np.inf)
            t2, _ = sp_integrate.quad(lambda k: -0.5 * pw(k), A, np.inf,
                                      weight="cos", wvar=2.0 * R + w)
            t3, _ = sp_integrate.quad(lambda k: -0.5 * pw(k), A, np.inf,
                                      weight="cos", wvar=abs(2.0 * R - w))
            tails = t1 + t2 + t3
        # ball tails are O(A^-3) ~ 1e-5 relative of the head's k^-4 weight;
        # fold the mean value and neglect the oscillatory remainder
        elif isinstance(ff, UniformBall):
            tails, _ = sp_integrate.quad(integrand, A, 4.0 * A, limit=2000)
        return head + tails


def _tent_self_convolution(s: float) -> float:
    """(f * f)(s) for f(u) = (1 - u^2) on [-1, 1]; support |s| <= 2."""
    s = abs(s)
    if s >= 2.0:
        return 0.0
    a = s - 1.0
    t1 = (1.0 - s * s) * (2.0 - s)
    t2 = s * s * (2.0 - s)
    t3 = -(2.0 - s * s) * (1.0 - a**3) / 3.0
    t4 = -s * (1.0 - a**4) / 2.0
    t5 = (1.0 - a**5) / 5.0
    return t1 + t2 + t3 + t4 + t5


@dataclass(frozen=True)
class HistoryFunction:
    """Velocity history on [-2R, 0] plus the position at t = 0."""

    q0: np.ndarray
    velocity: Callable[[float], np.ndarray]
    window: float

    @staticmethod
    def constant(q0, v0, window: float) -> "HistoryFunction":
        v0 = np.asarray(v0, dtype=float)
        if float(np.linalg.norm(v0)) >= 1.0:
            raise PhysicsError("history velocity must be sub-luminal")
        return HistoryFunction(np.asarray(q0, dtype=float), lambda t: v0, window)


def delay_coefficient(model: ChargeModel) -> float:
    """e^2 / (12 pi R^2), the strength of the velocity-difference self-force."""
    R = model.form_factor.radius
    return model.e**2 / (12.0 * math.pi * R * R)


def delay_rhs(model: ChargeModel, field: FieldMap, q, v, v_delayed) -> np.ndarray:
    """Acceleration of the shell memory equation (small-velocity regime)."""
    if not isinstance(model.form_factor, SphereShell):
        raise PhysicsError("the single-lag memory equation holds for the charged shell")
    force = field.lorentz_force(model.e, np.asarray(q, float), np.asarray(v, float))
    mem = delay_coefficient(model) * (np.asarray(v_delayed, float) - np.asarray(v, float))
    return (force + mem) / model.bare_mass


def integrate_dde(model: ChargeModel, field: FieldMap, history: HistoryFunction,
                  t_span, substeps_per_radius: int = 8) -> Trajectory:
    """Method-of-steps integration of the shell memory equation.

    The lag is the single constant 2R; each window of length 2R is advanced
    with fixed-substep RK4 (substep <= R / substeps_per_radius) and the
    history is interpolated by cubic Hermite on the stored knots.
    """
    if not isinstance(model.form_factor, SphereShell):
        raise PhysicsError("the single-lag memory equation holds for the charged shell")
    if model.bare_mass <= 0:
        raise PhysicsError("memory integration needs a positive bare mass")
    R = model.form_factor.radius
    lag = 2.0 * R
    if history.window < lag:
        raise PhysicsError(f"history window {history.window} shorter than the lag {lag}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    coeff = delay_coefficient(model)
    m_b = model.bare_mass
    e = model.e

    def v_past(t):
        if t <= t0:
            # sample the declared history directly
            return np.asarray(history.velocity(t - t0), float)
        if len(hist_t) < 2:
            # query a rounding ulp above t0 before the first window lands
            return hist_v[0].copy()
        i = int(np.searchsorted(hist_t, t, side="right")) - 1
        i = min(max(i, 0), len(hist_t) - 2)
        ta, tb = hist_t[i], hist_t[i + 1]
        s = (t - ta) / (tb - ta)
        h_ = tb - ta
        va, vb = hist_v[i], hist_v[i + 1]
        fa, fb = hist_a[i], hist_a[i + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * va + h10 * h_ * fa + h01 * vb + h11 * h_ * fb

    hist_t = np.array([t0])
    hist_v = np.array([np.asarray(history.velocity(0.0), float)])
    hist_a = np.zeros((1, 3))

    def rhs(t, y):
        q = y[0:3]
        v = y[3:6]
        if float(v @ v) >= (1.0 - 1e-9) ** 2:
            raise VelocityGuardError("memory equation left the sub-luminal regime")
        vd = v_past(t - lag)
        force = field.lorentz_force(e, q, v)
        acc = (force + coeff * (vd - v)) / m_b
        out = np.empty(7)
        out[0:3] = v
        out[3:6] = acc
        dv = v - vd
        out[6] = 0.5 * coeff * float(dv @ dv)   # dissipation rate of the store
        return out

    n_sub = max(1, int(math.ceil(lag / (R / substeps_per_radius))))
    y = np.concatenate([history.q0, np.asarray(history.velocity(0.0), float), [0.0]])
    hist_a[0] = rhs(t0, y)[3:6]
    ts_all = [t0]
    ys_all = [y.copy()]
    t = t0
    while t < t1 - 1e-12 * max(1.0, abs(t1)):
        t_next = min(t + lag, t1)
        n = max(1, int(round(n_sub * (t_next - t) / lag)))
        ts, ys, fs = rk4_fixed(rhs, t, y, t_next, n)
        # extend history knots (skip the duplicated first point)
        hist_t = np.concatenate([hist_t, ts[1:]])
        hist_v = np.vstack([hist_v, ys[1:, 3:6]])
        hist_a = np.vstack([hist_a, fs[1:, 3:6]])
        ts_all.extend(ts[1:].tolist())
        ys_all.extend(list(ys[1:]))
        y = ys[-1]
        t = t_next

    t_arr = np.array(ts_all)
    y_arr = np.array(ys_all)
    q = y_arr[:, 0:3]
    v = y_arr[:, 3:6]
    a = np.array([rhs(t_arr[i], y_arr[i])[3:6] for i in range(len(t_arr))])
    # energy bookkeeping: mechanical plus the dissipation integral carried in-state
    energy = np.array([0.5 * m_b * float(v[i] @ v[i]) + e * field.potential(q[i])
                       for i in range(len(t_arr))])
    traj = Trajectory(t=t_arr, q=q, v=v, a=a, energy=energy, schott=energy,
                      radiated=y_arr[:, 6])
    traj._dde_past = v_past  # type: ignore[attr-defined]
    return traj


def dde_energy_functional(model: ChargeModel, field: FieldMap, traj: Trajectory) -> np.ndarray:
    """Lyapunov functional: m_b v^2/2 + e phi + (coeff/2) int_{t-2R}^t v^2 ds.

    Its exact rate along solutions is -(coeff/2)|v(t) - v(t-2R)|^2 for zero
    external field, so it is conserved precisely on constant-velocity runs.
    """
    coeff = delay_coefficient(model)
    lag = 2.0 * model.form_factor.radius
    v_past = getattr(traj, "_dde_past", None)
    if v_past is None:
        raise PhysicsError("trajectory was not produced by integrate_dde")
    out = np.empty(len(traj.t))
    for i, t in enumerate(traj.t):
        grid = np.linspace(t - lag, t, 65)
        vals = np.array([float(np.dot(v_past(s), v_past(s))) for s in grid])
        store = np.trapezoid(vals, grid)
        out[i] = 0.5 * model.bare_mass * float(traj.v[i] @ traj.v[i]) \
            + model.e * field.potential(traj.q[i]) + 0.5 * coeff * store
    return out


def taylor_reduced_coefficients(model: ChargeModel) -> tuple[float, float]:
    """(renormalized mass m_b + e^2/(6 pi R), jerk coefficient e^2/(6 pi)).

    First-order Taylor of the lag shifts the mass; second order produces the
    point-charge jerk term, turning the memory equation into the third-order
    local equation whose physical branch is the effective dynamics.
    """
    R = model.form_factor.radius
    e2 = model.e**2
    return model.bare_mass + e2 / (6.0 * math.pi * R), e2 / (6.0 * math.pi)


def taylor_reduced_ld_model(model: ChargeModel, field: FieldMap):
    """Delegate the reduced local equation to the third-order machinery.

    The reduced equation M vdot = F + (e^2/6 pi) vddot is the small-velocity
    limit of the relativistic third-order flow for a particle of experimental
    mass M; its physical (asymptotic-condition) branch comes from backward
    integration of that model.
    """
    from .lorentz_dirac import LdModel, MassModel
    from .units import ChargeModel as CM
    from .units import PointLimit
    m_ren, _ = taylor_reduced_coefficients(model)
    point = CM(e=model.e, m0=m_ren, form_factor=PointLimit(), units=model.units)
    return LdModel(charge=point, field=field, eps=1.0,
                   mass_model=MassModel.RELATIVISTIC)

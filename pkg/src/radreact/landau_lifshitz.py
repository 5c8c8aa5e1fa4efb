"""Effective second-order dynamics on the critical manifold.

The relativistic variant is assembled in closed form from the field values
and gradients; the semi-relativistic variant substitutes the zeroth-order
manifold acceleration h = m(v)^-1 F into the radiation-reaction bracket.
Closed-form special cases (constant B decay, central potentials, 1-D
potentials) live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize as sp_optimize

from .errors import PhysicsError, VelocityGuardError
from .integrate import StepControls, solve_rk45
from .lorentz_dirac import (VELOCITY_GUARD, LdModel, MassModel, Trajectory,
                            radiated_power)

#: Landau-Lifshitz models carry the same data as Lorentz-Dirac models.
LlModel = LdModel


def _guard(v):
    u2 = float(v @ v)
    if u2 >= VELOCITY_GUARD * VELOCITY_GUARD:
        raise VelocityGuardError(f"|v| = {math.sqrt(u2)} inside the guard band")
    return u2


def ll_rhs(model: LlModel, q, v) -> tuple[np.ndarray, np.ndarray]:
    """(dq/dt, dv/dt) of the effective equation, first order in eps."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    u2 = _guard(v)
    if model.mass_model is MassModel.RELATIVISTIC:
        return v, _accel_relativistic(model, q, v, u2)
    return v, _accel_substituted(model, q, v)


def _accel_relativistic(model: LlModel, q, v, u2) -> np.ndarray:
    e = model.charge.e
    m0 = model.charge.m0
    g2 = 1.0 / (1.0 - u2)
    gamma = math.sqrt(g2)
    E = model.field.e_field(q)
    B = model.field.b_field(q)
    w = E + np.cross(v, B)
    # (v . grad)(E + v x B) from the analytic field gradients
    ge = model.field.grad_e(q)
    gb = model.field.grad_b(q)
    conv = ge @ v + np.cross(v, gb @ v)
    exb = np.cross(E, B)
    ve = float(v @ E)
    vb = float(v @ B)
    scalar = (-float(E @ E) - float(B @ B) + ve * ve + vb * vb
              + 2.0 * float(v @ exb)) * g2
    corr = (e / m0) * gamma * conv + (e / m0) ** 2 * (exb + ve * E + vb * B + scalar * v)
    rhs = e * w + model.eps * e * e / (6.0 * math.pi) * corr
    # [m0 gamma kappa]^-1 = (1/m0 gamma)(1 - |v><v|)
    return (rhs - v * float(v @ rhs)) / (m0 * gamma)


def manifold_h(model: LlModel, q, v) -> np.ndarray:
    return model.h_manifold(q, v)


def _grad_q_h(model: LlModel, q, v) -> np.ndarray:
    """(v . grad_q) h without forming the full Jacobian."""
    e = model.charge.e
    ge = model.field.grad_e(q)
    gb = model.field.grad_b(q)
    dF = e * (ge @ v + np.cross(v, gb @ v))
    return model.mass_matrix(v).solve(dF)


def _grad_v_h_apply(model: LlModel, q, v, x, step=1e-6) -> np.ndarray:
    """(x . grad_v) h by central differences along x."""
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return np.zeros(3)
    h = step * (1.0 + float(np.linalg.norm(v))) / nx
    hp = model.h_manifold(q, v + h * x)
    hm = model.h_manifold(q, v - h * x)
    return (hp - hm) / (2.0 * h)


def _accel_substituted(model: LlModel, q, v) -> np.ndarray:
    """Radiation bracket with v-dot -> h, v-ddot -> h-dot substituted."""
    u2 = float(v @ v)
    g2 = 1.0 / (1.0 - u2)
    hvec = model.h_manifold(q, v)
    hdot = _grad_q_h(model, q, v) + _grad_v_h_apply(model, q, v, hvec)
    vh = float(v @ hvec)
    if model.mass_model is MassModel.RELATIVISTIC:
        inner = hdot + 3.0 * g2 * vh * hvec
        bracket = g2 * (inner + g2 * v * float(v @ inner))
    else:
        kap = hdot + g2 * v * float(v @ hdot)
        bracket = g2 * kap + 3.0 * g2**3 * vh * vh * v + 3.0 * g2**2 * vh * hvec
    force = model.external_force(q, v)
    rhs = force + model.eps * model.charge.e**2 / (6.0 * math.pi) * bracket
    return model.mass_matrix(v).solve(rhs)


def ll_rhs_substituted(model: LlModel, q, v) -> tuple[np.ndarray, np.ndarray]:
    """Independent assembly of the same dynamics via the formal substitution.

    For the relativistic mass model the velocity derivative of h is analytic,
    so this route matches the closed-form assembly to near machine precision.
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    u2 = _guard(v)
    g2 = 1.0 / (1.0 - u2)
    if model.mass_model is not MassModel.RELATIVISTIC:
        return v, _accel_substituted(model, q, v)
    e = model.charge.e
    m0 = model.charge.m0
    gamma_inv = math.sqrt(1.0 - u2)
    E = model.field.e_field(q)
    B = model.field.b_field(q)
    w = E + np.cross(v, B)
    p_vec = w - v * float(v @ w)
    hvec = (e / m0) * gamma_inv * p_vec
    # analytic (x . grad_v) h at x = h
    x = hvec
    dw = np.cross(x, B)
    bxv = np.cross(B, v)
    dp = dw - x * float(v @ w) - v * (float(w @ x) + float(bxv @ x))
    dgamma_inv = -float(v @ x) / gamma_inv
    dh_v = (e / m0) * (dgamma_inv * p_vec + gamma_inv * dp)
    hdot = _grad_q_h(model, q, v) + dh_v
    vh = float(v @ hvec)
    inner = hdot + 3.0 * g2 * vh * hvec
    bracket = g2 * (inner + g2 * v * float(v @ inner))
    rhs = e * w + model.eps * e * e / (6.0 * math.pi) * bracket
    return v, (rhs - v * float(v @ rhs)) / (m0 / gamma_inv)


def _uniform_b_accel(model: LlModel):
    """Specialized in-field acceleration for E = 0, constant B (hot loop)."""
    b = model.field.uniform_b
    e = model.charge.e
    m0 = model.charge.m0
    c2 = model.eps * e * e / (6.0 * math.pi) * (e / m0) ** 2
    guard2 = VELOCITY_GUARD * VELOCITY_GUARD
    b2 = float(b @ b)

    def accel(q, v):
        u2 = v @ v
        if u2 >= guard2:
            raise VelocityGuardError("|v| inside the guard band")
        vb = v @ b
        rhs = np.empty(3)
        rhs[0] = e * (v[1] * b[2] - v[2] * b[1]) + c2 * (vb * b[0] - b2 * v[0])
        rhs[1] = e * (v[2] * b[0] - v[0] * b[2]) + c2 * (vb * b[1] - b2 * v[1])
        rhs[2] = e * (v[0] * b[1] - v[1] * b[0]) + c2 * (vb * b[2] - b2 * v[2])
        return rhs * (math.sqrt(1.0 - u2) / m0)

    return accel


def integrate(model: LlModel, q0, v0, t_span,
              controls: StepControls = StepControls()) -> Trajectory:
    """Adaptive integration of the effective flow; no runaway machinery."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    if model.field.uniform_b is not None and model.mass_model is MassModel.RELATIVISTIC:
        accel = _uniform_b_accel(model)
    else:
        accel = lambda q, v: ll_rhs(model, q, v)[1]  # noqa: E731
    rad_coeff = model.eps * model.charge.e**2 / (6.0 * math.pi)

    def fun(t, y):
        v = y[3:6]
        a = accel(y[0:3], v)
        u2 = v @ v
        g2 = 1.0 / (1.0 - u2)
        out = np.empty(7)
        out[0:3] = v
        out[3:6] = a
        out[6] = rad_coeff * (g2 * g2 * (a @ a) + g2**3 * (v @ a) ** 2)
        return out

    y0 = np.concatenate([np.asarray(q0, float), np.asarray(v0, float), [0.0]])
    sol = solve_rk45(fun, t0, y0, t1, controls)
    q = sol.y[:, 0:3]
    v = sol.y[:, 3:6]
    a = np.array([ll_rhs(model, q[i], v[i])[1] for i in range(len(sol.t))])
    energy = np.array([model.mechanical_energy(q[i], v[i]) for i in range(len(sol.t))])
    ee = model.eps * model.charge.e**2 / (6.0 * math.pi)
    g4 = 1.0 / (1.0 - np.sum(v * v, axis=1)) ** 2
    schott = energy - ee * g4 * np.sum(v * a, axis=1)
    traj = Trajectory(t=sol.t, q=q, v=v, a=a, energy=energy, schott=schott,
                      radiated=sol.y[:, 6], sol=sol)
    traj._layout = (0, 3, None)
    traj.stop_reason = sol.stop_reason
    return traj


# --- constant magnetic field: closed forms ---------------------------------

@dataclass(frozen=True)
class ConstantBDecay:
    """Closed-form in-plane decay in a uniform magnetic field.

    All rates carry the model's adiabatic prefactor: the damping constant is
    eps * beta * omega_c^2 and the per-radian speed decay is eps * beta * omega_c.
    """

    omega_c: float
    damping: float        # eps beta omega_c^2
    per_angle: float      # eps beta omega_c
    gamma0: float

    @property
    def u0(self) -> float:
        return math.sqrt(self.gamma0**2 - 1.0) / self.gamma0

    @property
    def r0(self) -> float:
        return self.u0 * self.gamma0 / self.omega_c

    def gamma_of_t(self, t):
        t = np.asarray(t, dtype=float)
        ex = np.exp(-2.0 * self.damping * t)
        g0 = self.gamma0
        return (g0 + 1.0 + (g0 - 1.0) * ex) / (g0 + 1.0 - (g0 - 1.0) * ex)

    def speed_of_angle(self, phi):
        return self.u0 * np.exp(-self.per_angle * np.asarray(phi, dtype=float))

    def radius_of_t(self, t):
        t = np.asarray(t, dtype=float)
        ex = np.exp(-self.damping * t)
        ex2 = ex * ex
        return self.r0 * ex / (1.0 + 0.5 * (self.gamma0 - 1.0) * (1.0 - ex2))

    def radius_ultrarel(self, t):
        return self.r0 / (1.0 + self.gamma0 * self.damping * np.asarray(t, dtype=float))

    def time_for_radius_ratio(self, ratio: float) -> float:
        """Numeric inversion of the exact radius decay for r(t)/r0 = ratio."""
        if not 0.0 < ratio < 1.0:
            raise PhysicsError("radius ratio must be in (0, 1)")
        t_hi = 1.0
        while self.radius_of_t(t_hi) / self.r0 > ratio:
            t_hi *= 2.0
        return sp_optimize.brentq(
            lambda t: self.radius_of_t(t) / self.r0 - ratio, 0.0, t_hi,
            xtol=1e-14 * t_hi, rtol=1e-14)

    def revolution_count(self, t_end: float, rtol: float = 1e-10) -> float:
        """Integral of omega_c / (2 pi gamma_t) over [0, t_end]."""
        val, _ = sp_integrate.quad(
            lambda t: self.omega_c / (2.0 * math.pi * float(self.gamma_of_t(t))),
            0.0, t_end, epsabs=0.0, epsrel=rtol, limit=400)
        return val


def constant_b_closed_forms(model: LlModel, b: float, gamma0: float) -> ConstantBDecay:
    if gamma0 < 1.0:
        raise PhysicsError("gamma0 must be >= 1")
    if b <= 0.0:
        raise PhysicsError("field strength must be positive")
    omega_c = model.charge.e * b / model.charge.m0
    bw = model.eps * model.charge.beta * omega_c
    return ConstantBDecay(omega_c=omega_c, damping=bw * omega_c,
                          per_angle=bw, gamma0=gamma0)


# --- central potential ------------------------------------------------------

def central_potential_rhs(model: LlModel, field_map, q, v) -> tuple[np.ndarray, np.ndarray]:
    """Effective dynamics in a central electrostatic potential (B = 0 map)."""
    return ll_rhs(model.__class__(charge=model.charge, field=field_map,
                                  eps=model.eps, mass_model=model.mass_model), q, v)


def angular_momentum_decay(model: LlModel, dphi, q, v) -> tuple[float, np.ndarray]:
    """Decay rate of L = r x m0 gamma v: dL/dt = lambda L for a central profile.

    dphi is the radial derivative phi'(r).  Returns (lambda, dL/dt).
    Contracting r x (m0 gamma kappa a) with L leaves a single power of gamma
    on the quadratic field term:
        lambda = eps beta [ -(e/m0) phi'/r - (e/m0)^2 gamma (1 - v_r^2) phi'^2 ].
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(q))
    if r == 0.0:
        raise PhysicsError("angular momentum rate undefined at r = 0")
    u2 = _guard(v)
    gamma = 1.0 / math.sqrt(1.0 - u2)
    e = model.charge.e
    m0 = model.charge.m0
    dp = dphi(r)
    vr = float(v @ q) / r
    lam = model.eps * model.charge.beta * (
        -(e / m0) * dp / r - (e / m0) ** 2 * gamma * (1.0 - vr * vr) * dp * dp)
    ell = np.cross(q, m0 * gamma * v)
    return lam, lam * ell


# --- potentials varying along one axis --------------------------------------

def axial_1d_rhs(model: LlModel, dphi, d2phi, x: float, v: float) -> float:
    """1-D effective equation: m0 g^3 vdot = -e phi' - eps (e^2/6pi)(e/m0) g phi'' v."""
    if abs(v) >= VELOCITY_GUARD:
        raise VelocityGuardError("1-D velocity inside the guard band")
    e = model.charge.e
    m0 = model.charge.m0
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    drag = model.eps * e * e / (6.0 * math.pi) * (e / m0) * gamma * d2phi(x) * v
    return (-e * dphi(x) - drag) / (m0 * gamma**3)


def axial_energy_terms(model: LlModel, phi, dphi, d2phi, x: float, v: float) -> tuple[float, float]:
    """(balance quantity, its exact time derivative) for the 1-D dynamics.

    The quantity is m0 gamma + e phi + eps (e^2/6pi)(e/m0) gamma phi' v; its
    derivative along the flow is minus the Larmor loss plus a second-order
    friction-gradient term that never wins over a full traversal.
    """
    e = model.charge.e
    m0 = model.charge.m0
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    ee = model.eps * e * e / (6.0 * math.pi)
    quantity = m0 * gamma + e * phi(x) + ee * (e / m0) * gamma * dphi(x) * v
    rate = -ee * (e / m0) ** 2 * dphi(x) ** 2 \
        - (ee * (e / m0)) ** 2 / m0 * gamma * dphi(x) * d2phi(x) * v
    return quantity, rate

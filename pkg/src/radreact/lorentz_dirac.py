"""The third-order equation of motion with radiation reaction.

Two mass models share one interface: the semi-relativistic extended-charge
variant (velocity-dependent mass built from the bare and field inertia) and
the fully relativistic variant (m0 gamma kappa(v)).  Forward integration
deliberately exposes the runaway structure; backward integration implements
the asymptotic-condition selection by letting the reversed flow collapse
onto the critical manifold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import soliton
from .errors import PhysicsError, VelocityGuardError
from .fields import FieldMap
from .integrate import OdeSolution, StepControls, StopIntegration, solve_rk45
from .units import ChargeModel

VELOCITY_GUARD = 1.0 - 1e-9


class MassModel(enum.Enum):
    SEMI_REL_ABRAHAM = "semi_rel_abraham"
    RELATIVISTIC = "relativistic"


@dataclass(frozen=True)
class JetState:
    """Kinematic jet (q, v, a); velocities strictly sub-luminal."""

    q: np.ndarray
    v: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        if not np.all(np.isfinite(self.q)) or not np.all(np.isfinite(self.v)) \
                or not np.all(np.isfinite(self.a)):
            raise PhysicsError("jet state has non-finite components")
        if float(np.linalg.norm(self.v)) >= 1.0:
            raise PhysicsError("jet state velocity is not sub-luminal")


@dataclass(frozen=True)
class LdModel:
    charge: ChargeModel
    field: FieldMap
    eps: float = 1.0
    mass_model: MassModel = MassModel.RELATIVISTIC

    def __post_init__(self):
        if self.eps <= 0:
            raise PhysicsError("adiabatic parameter must be positive")

    def mass_matrix(self, v) -> soliton.MassMatrix:
        if self.mass_model is MassModel.RELATIVISTIC:
            return soliton.relativistic_mass_matrix(self.charge.m0, v)
        return soliton.effective_mass_matrix(self.charge, v)

    def external_force(self, q, v) -> np.ndarray:
        return self.field.lorentz_force(self.charge.e, q, v)

    def h_manifold(self, q, v) -> np.ndarray:
        """Zeroth-order manifold acceleration m(v)^-1 F_ex(q, v)."""
        return self.mass_matrix(v).solve(self.external_force(q, v))

    def mechanical_energy(self, q, v) -> float:
        phi = self.field.potential(q)
        v = np.asarray(v, dtype=float)
        u = float(np.linalg.norm(v))
        if self.mass_model is MassModel.RELATIVISTIC:
            kinetic = self.charge.m0 / math.sqrt(1.0 - u * u)
        else:
            kinetic = soliton.energy_of_velocity(self.charge, v)
        return kinetic + self.charge.e * phi


def _guard_velocity(v):
    u = float(np.linalg.norm(v))
    if u >= VELOCITY_GUARD:
        raise VelocityGuardError(f"|v| = {u} inside the guard band at 1 - 1e-9")
    return u


def ld_rhs(model: LdModel, s: JetState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Time derivative (v, a, jerk) of the jet state."""
    u = _guard_velocity(s.v)
    v, a = s.v, s.a
    gamma2 = 1.0 / (1.0 - u * u)
    gamma = math.sqrt(gamma2)
    pref = 6.0 * math.pi / (model.eps * model.charge.e**2)
    force = model.external_force(s.q, v)
    va = float(v @ a)
    if model.mass_model is MassModel.RELATIVISTIC:
        # kappa^-1 x = x - v (v.x)
        kinv_f = force - v * float(v @ force)
        jerk = pref * (model.charge.m0 / gamma * a - kinv_f / gamma2) \
            - 3.0 * gamma2 * va * a
    else:
        core = pref * (model.mass_matrix(v).apply(a) - force) \
            - 3.0 * gamma2**3 * va * va * v - 3.0 * gamma2**2 * va * a
        jerk = (core - v * float(v @ core)) / gamma2
    return v, a, jerk


def schott_energy(model: LdModel, s: JetState) -> float:
    """Mechanical energy minus the near-field store eps (e^2/6 pi) g^4 (v.a)."""
    u = _guard_velocity(s.v)
    gamma4 = 1.0 / (1.0 - u * u) ** 2
    near = model.eps * model.charge.e**2 / (6.0 * math.pi) * gamma4 * float(s.v @ s.a)
    return model.mechanical_energy(s.q, s.v) - near


def radiated_power(model: LdModel, v, a) -> float:
    """eps (e^2/6 pi)[g^4 a^2 + g^6 (v.a)^2], the loss side of the balance."""
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    u2 = float(v @ v)
    g2 = 1.0 / (1.0 - u2)
    return model.eps * model.charge.e**2 / (6.0 * math.pi) * (
        g2**2 * float(a @ a) + g2**3 * float(v @ a) ** 2)


@dataclass
class Trajectory:
    """Sampled run with per-sample diagnostics and the dense solution handle."""

    t: np.ndarray
    q: np.ndarray
    v: np.ndarray
    a: np.ndarray
    energy: np.ndarray
    schott: np.ndarray
    radiated: np.ndarray
    runaway_detected: bool = False
    collision_halt: bool = False
    stop_reason: str | None = None
    sol: OdeSolution | None = None
    _layout: tuple = dc_field(default=(0, 3, 6), repr=False)
    _reversed_final: float | None = dc_field(default=None, repr=False)

    def sample_qva(self, times):
        """Dense (q, v, a) at arbitrary times inside the span."""
        if self.sol is None:
            raise PhysicsError("trajectory has no dense output")
        times = np.asarray(times, dtype=float)
        if self._reversed_final is not None:
            y = self.sol(self._reversed_final - times)
        else:
            y = self.sol(times)
        iq, iv, ia = self._layout
        q = y[..., iq:iq + 3]
        v = y[..., iv:iv + 3]
        if ia is None:
            a = None
        else:
            a = y[..., ia:ia + 3]
        return q, v, a

    @property
    def final_state(self) -> JetState:
        return JetState(self.q[-1], self.v[-1], self.a[-1])

    @property
    def initial_state(self) -> JetState:
        return JetState(self.q[0], self.v[0], self.a[0])


@dataclass(frozen=True)
class LdControls:
    step: StepControls = StepControls()
    detect_runaways: bool = True
    runaway_multiple: float = 10.0
    runaway_floor: float | None = None   # default: 1e-12 / (eps * beta)
    runaway_consecutive: int = 3


def _pack(s: JetState) -> np.ndarray:
    return np.concatenate([s.q, s.v, s.a, [0.0]])


def _ld_ode(model: LdModel):
    """Allocation-lean RHS for the augmented state (q, v, a, E_rad)."""
    e_charge = model.charge.e
    m0 = model.charge.m0
    pref = 6.0 * math.pi / (model.eps * e_charge**2)
    rad_coeff = model.eps * e_charge**2 / (6.0 * math.pi)
    e_field = model.field.e_field
    b_field = model.field.b_field
    relativistic = model.mass_model is MassModel.RELATIVISTIC

    def fun(t, y):
        q = y[0:3]
        v = y[3:6]
        a = y[6:9]
        u2 = v @ v
        if u2 >= VELOCITY_GUARD * VELOCITY_GUARD:
            raise VelocityGuardError(f"|v| = {math.sqrt(u2)} inside the guard band")
        g2 = 1.0 / (1.0 - u2)
        b = b_field(q)
        force = e_field(q).copy()
        force[0] += v[1] * b[2] - v[2] * b[1]
        force[1] += v[2] * b[0] - v[0] * b[2]
        force[2] += v[0] * b[1] - v[1] * b[0]
        force *= e_charge
        va = v @ a
        if relativistic:
            kinv_f = force - v * (v @ force)
            jerk = pref * (m0 / math.sqrt(g2) * a - kinv_f / g2) - (3.0 * g2 * va) * a
        else:
            core = pref * (model.mass_matrix(v).apply(a) - force) \
                - (3.0 * g2**3 * va * va) * v - (3.0 * g2**2 * va) * a
            jerk = (core - v * (v @ core)) / g2
        out = np.empty(10)
        out[0:3] = v
        out[3:6] = a
        out[6:9] = jerk
        out[9] = rad_coeff * (g2 * g2 * (a @ a) + g2**3 * va * va)
        return out

    return fun


def _trajectory_from_solution(model, sol: OdeSolution, reversed_time=False) -> Trajectory:
    t = sol.t
    y = sol.y
    if reversed_time:
        # samples were produced at sigma = T - t; flip to forward order
        t = t[-1] - t[::-1]
        y = y[::-1]
    q, v, a = y[:, 0:3], y[:, 3:6], y[:, 6:9]
    # in reversed time the last column integrates -P, so after reordering it
    # already runs from -total to 0; re-zeroing at the first sample fixes both
    rad = y[:, 9] - y[0, 9]
    energy = np.array([model.mechanical_energy(q[i], v[i]) for i in range(len(t))])
    ee = model.eps * model.charge.e**2 / (6.0 * math.pi)
    g4 = 1.0 / (1.0 - np.sum(v * v, axis=1)) ** 2
    schott = energy - ee * g4 * np.sum(v * a, axis=1)
    return Trajectory(t=t, q=q, v=v, a=a, energy=energy, schott=schott,
                      radiated=rad, sol=sol,
                      _reversed_final=sol.t[-1] if reversed_time else None)


def integrate_forward(model: LdModel, s0: JetState, t_span,
                      controls: LdControls = LdControls()) -> Trajectory:
    """Integrate the third-order flow forward; runaways are detected, not solved."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    floor = controls.runaway_floor
    if floor is None:
        floor = 1e-12 / (model.eps * model.charge.beta)
    strikes = 0

    def monitor(t, y, f):
        nonlocal strikes
        _guard_velocity(y[3:6])
        if not controls.detect_runaways:
            return
        a_mag = float(np.linalg.norm(y[6:9]))
        h_ref = float(np.linalg.norm(model.h_manifold(y[0:3], y[3:6])))
        if a_mag > controls.runaway_multiple * max(h_ref, floor):
            strikes += 1
            if strikes >= controls.runaway_consecutive:
                raise StopIntegration("runaway")
        else:
            strikes = 0

    sol = solve_rk45(_ld_ode(model), t0, _pack(s0), t1, controls.step, monitor=monitor)
    traj = _trajectory_from_solution(model, sol)
    traj.t = traj.t  # forward order already
    traj.runaway_detected = sol.stop_reason == "runaway"
    traj.stop_reason = sol.stop_reason
    return traj


def integrate_backward(model: LdModel, terminal_q, terminal_v, t_final: float,
                       controls: LdControls = LdControls()) -> Trajectory:
    """Select the physical (asymptotic-condition) solution ending at (q_T, v_T).

    The terminal acceleration is seeded on the zeroth-order manifold; its
    O(eps) error dies at rate 1/(eps beta) in reversed time, so a terminal
    transient of length ~10 eps beta is present in the returned samples.
    """
    if t_final <= 0:
        raise PhysicsError("backward integration needs a positive horizon")
    q_t = np.asarray(terminal_q, dtype=float)
    v_t = np.asarray(terminal_v, dtype=float)
    a_t = model.h_manifold(q_t, v_t)
    s_t = JetState(q_t, v_t, a_t)

    fwd = _ld_ode(model)

    def reversed_fun(sigma, y):
        return -fwd(t_final - sigma, y)

    def monitor(t, y, f):
        _guard_velocity(y[3:6])

    sol = solve_rk45(reversed_fun, 0.0, _pack(s_t), t_final, controls.step,
                     monitor=monitor)
    traj = _trajectory_from_solution(model, sol, reversed_time=True)
    traj.stop_reason = sol.stop_reason
    return traj


def linearized_oscillator_roots(omega0: float, eps_k: float) -> tuple[complex, complex, complex]:
    """Roots of eps_k z^3 - z^2 - omega0^2 = 0: (stable-, stable+, runaway).

    Newton iteration from the leading-order seeds; an independent companion
    matrix solve is kept on the test side as the oracle.
    """
    if omega0 <= 0 or eps_k <= 0:
        raise PhysicsError("need omega0 > 0 and eps_k > 0")

    def polish(z: complex) -> complex:
        for _ in range(100):
            p = eps_k * z**3 - z**2 - omega0**2
            dp = 3.0 * eps_k * z**2 - 2.0 * z
            step = p / dp
            z = z - step
            if abs(step) <= 1e-15 * (1.0 + abs(z)):
                break
        return z

    z_plus = polish(complex(-eps_k * omega0**2 / 2.0, omega0))
    z_minus = polish(complex(-eps_k * omega0**2 / 2.0, -omega0))
    z_run = polish(complex(1.0 / eps_k, 0.0))
    return z_minus, z_plus, z_run

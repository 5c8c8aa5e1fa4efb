"""Many-charge effective dynamics: Coulomb, order-(v/c)^2, and a retarded oracle.

The velocity-dependent pair potential couples accelerations, so each force
evaluation solves a dense 3N x 3N linear system (N is desk-scale).  The
fully retarded two-body integrator keeps a dense history per particle and
evaluates the partner's point-charge retarded field; it is the oracle for
the claim that the conservative dynamics captures the full (v/c)^2 term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError, RetardedSolveError
from .integrate import StepControls, StopIntegration, solve_rk45
from .soliton import effective_mass_matrix
from .units import ChargeModel, PointLimit


@dataclass(frozen=True)
class BodySpec:
    model: ChargeModel
    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))


@dataclass(frozen=True)
class ManyBodyState:
    bodies: tuple[BodySpec, ...]
    c: float = 1.0   # explicit light speed for limit studies

    def __post_init__(self):
        if self.c <= 0:
            raise PhysicsError("light speed must be positive")
        for b in self.bodies:
            if float(np.linalg.norm(b.v)) >= self.c:
                raise PhysicsError("body velocity must stay below c")
        n = len(self.bodies)
        for i in range(n):
            for j in range(i + 1, n):
                if np.array_equal(self.bodies[i].q, self.bodies[j].q):
                    raise PhysicsError("coincident body positions")

    @property
    def n(self) -> int:
        return len(self.bodies)

    def masses(self) -> np.ndarray:
        return np.array([b.model.m_eff for b in self.bodies])

    def quartic_coeffs(self) -> np.ndarray:
        """u^4 kinetic coefficients (m_b/8 + 2 m_e/15)/c^2 per body."""
        out = np.empty(self.n)
        for i, b in enumerate(self.bodies):
            if isinstance(b.model.form_factor, PointLimit):
                # point particles carry the expansion of m0 gamma instead
                out[i] = b.model.m0 / 8.0 / self.c**2
            else:
                out[i] = (b.model.bare_mass / 8.0
                          + 2.0 / 15.0 * b.model.m_e_self) / self.c**2
        return out

    def charges(self) -> np.ndarray:
        return np.array([b.model.e for b in self.bodies])

    def positions(self) -> np.ndarray:
        return np.array([b.q for b in self.bodies])

    def velocities(self) -> np.ndarray:
        return np.array([b.v for b in self.bodies])

    def _arrays(self):
        return (self.masses(), self.quartic_coeffs(), self.charges(),
                self.positions(), self.velocities(), self.c**2)


# --- Lagrangian pieces -------------------------------------------------------

def darwin_lagrangian_terms(state: ManyBodyState) -> dict:
    """Kinetic and potential pieces {T0, T1, U0, U1} of the effective Lagrangian."""
    m, d4, e, q, v, c2 = state._arrays()
    t0 = 0.5 * float(np.sum(m * np.sum(v * v, axis=1)))
    t1 = float(np.sum(d4 * np.sum(v * v, axis=1) ** 2))
    u0 = 0.0
    u1 = 0.0
    for i in range(state.n):
        for j in range(state.n):
            if i == j:
                continue
            r = q[i] - q[j]
            dist = float(np.linalg.norm(r))
            if dist == 0.0:
                raise PhysicsError("coincident positions in potential")
            nij = r / dist
            coul = e[i] * e[j] / (4.0 * math.pi * dist)
            u0 += 0.5 * coul
            u1 += -0.25 * coul / c2 * (float(v[i] @ v[j])
                                       + float(v[i] @ nij) * float(nij @ v[j]))
    return {"T0": t0, "T1": t1, "U0": u0, "U1": u1}


def darwin_lagrangian(state: ManyBodyState) -> float:
    terms = darwin_lagrangian_terms(state)
    return terms["T0"] + terms["T1"] - terms["U0"] - terms["U1"]


def darwin_energy(state: ManyBodyState) -> float:
    """Legendre transform of the Lagrangian; conserved along the exact flow.

    The velocity-dependent pair term is quadratic in the velocities, so it
    enters the energy with the sign it carries in the Lagrangian: -U1.
    """
    terms = darwin_lagrangian_terms(state)
    return terms["T0"] + 3.0 * terms["T1"] + terms["U0"] - terms["U1"]


def darwin_momenta(state: ManyBodyState) -> np.ndarray:
    """Canonical momenta dL/dv_k (n x 3); their sum is conserved."""
    m, d4, e, q, v, c2 = state._arrays()
    p = np.empty((state.n, 3))
    for k in range(state.n):
        pk = m[k] * v[k] + 4.0 * d4[k] * float(v[k] @ v[k]) * v[k]
        for j in range(state.n):
            if j == k:
                continue
            r = q[k] - q[j]
            dist = float(np.linalg.norm(r))
            nkj = r / dist
            coul = e[k] * e[j] / (4.0 * math.pi * dist)
            pk = pk + 0.5 * coul / c2 * (v[j] + nkj * float(nkj @ v[j]))
        p[k] = pk
    return p


def _position_gradient(m, d4, e, q, v, c2, n):
    """dL/dr_k for every k (n x 3)."""
    out = np.zeros((n, 3))
    for k in range(n):
        for j in range(n):
            if j == k:
                continue
            r = q[k] - q[j]
            dist = float(np.linalg.norm(r))
            nkj = r / dist
            coul = e[k] * e[j] / (4.0 * math.pi * dist)
            skj = float(v[k] @ v[j]) + float(v[k] @ nkj) * float(nkj @ v[j])
            out[k] += coul * nkj / dist \
                + 0.5 * coul / c2 * (
                    -skj * nkj / dist
                    + (float(v[k] @ nkj) * (v[j] - nkj * float(nkj @ v[j]))
                       + float(v[j] @ nkj) * (v[k] - nkj * float(nkj @ v[k]))) / dist)
    return out


def _accelerations_raw(m, d4, e, q, v, c2, n):
    big = np.zeros((3 * n, 3 * n))
    eye = np.eye(3)
    conv = np.zeros((n, 3))
    for k in range(n):
        u2 = float(v[k] @ v[k])
        big[3 * k:3 * k + 3, 3 * k:3 * k + 3] = (
            (m[k] + 4.0 * d4[k] * u2) * eye + 8.0 * d4[k] * np.outer(v[k], v[k]))
        for j in range(n):
            if j == k:
                continue
            r = q[k] - q[j]
            dist = float(np.linalg.norm(r))
            nkj = r / dist
            coul = e[k] * e[j] / (4.0 * math.pi * dist)
            big[3 * k:3 * k + 3, 3 * j:3 * j + 3] += \
                0.5 * coul / c2 * (eye + np.outer(nkj, nkj))
            w = v[k] - v[j]
            w_perp = w - nkj * float(nkj @ w)
            conv[k] += 0.5 * coul / c2 * (
                -float(nkj @ w) / dist * (v[j] + nkj * float(nkj @ v[j]))
                + (w_perp * float(nkj @ v[j]) + nkj * float(w_perp @ v[j])) / dist)
    rhs = (_position_gradient(m, d4, e, q, v, c2, n) - conv).ravel()
    try:
        acc = np.linalg.solve(big, rhs)
    except np.linalg.LinAlgError as exc:
        raise PhysicsError("singular acceleration coupling (collision)") from exc
    return acc.reshape(n, 3)


def darwin_accelerations(state: ManyBodyState) -> np.ndarray:
    """Solve the acceleration-coupled Euler-Lagrange system exactly (n x 3)."""
    m, d4, e, q, v, c2 = state._arrays()
    return _accelerations_raw(m, d4, e, q, v, c2, state.n)


def darwin_forces(state: ManyBodyState) -> np.ndarray:
    """Rates of change of the canonical momenta, dp_k/dt = dL/dr_k (n x 3)."""
    m, d4, e, q, v, c2 = state._arrays()
    return _position_gradient(m, d4, e, q, v, c2, state.n)


def darwin_mechanical_forces(state: ManyBodyState) -> np.ndarray:
    """Rates of change of the kinetic momenta d/dt dT/dv_k (n x 3).

    This is the quantity a Lorentz force balances, so it is the one to
    compare against the retarded mutual force (the canonical momentum also
    carries the velocity-potential's interaction momentum).
    """
    m, d4, e, q, v, c2 = state._arrays()
    acc = _accelerations_raw(m, d4, e, q, v, c2, state.n)
    out = np.empty((state.n, 3))
    for k in range(state.n):
        u2 = float(v[k] @ v[k])
        out[k] = (m[k] + 4.0 * d4[k] * u2) * acc[k] \
            + 8.0 * d4[k] * float(v[k] @ acc[k]) * v[k]
    return out


def coulomb_forces(state: ManyBodyState) -> np.ndarray:
    e = state.charges()
    q = state.positions()
    out = np.zeros((state.n, 3))
    for k in range(state.n):
        for j in range(state.n):
            if j == k:
                continue
            r = q[k] - q[j]
            dist = float(np.linalg.norm(r))
            out[k] += e[k] * e[j] / (4.0 * math.pi * dist**2) * (r / dist)
    return out


@dataclass
class ManyBodyTrajectory:
    t: np.ndarray
    q: np.ndarray        # (n_samples, n_bodies, 3)
    v: np.ndarray
    energy: np.ndarray
    momentum: np.ndarray  # (n_samples, 3)
    collision_halt: bool = False
    stop_reason: str | None = None


def _with_state(state: ManyBodyState, q, v) -> ManyBodyState:
    bodies = tuple(BodySpec(b.model, q[i], v[i]) for i, b in enumerate(state.bodies))
    return ManyBodyState(bodies=bodies, c=state.c)


def integrate_darwin(state0: ManyBodyState, t_span,
                     controls: StepControls = StepControls(),
                     collision_radius: float | None = None) -> ManyBodyTrajectory:
    """Adaptive integration of the conservative flow, halting at first collision."""
    n = state0.n
    if collision_radius is None:
        min_sep = min(float(np.linalg.norm(state0.bodies[i].q - state0.bodies[j].q))
                      for i in range(n) for j in range(i + 1, n)) if n > 1 else 1.0
        collision_radius = 1e-3 * min_sep
    m, d4, e, _, _, c2 = state0._arrays()

    def fun(t, y):
        q = y[:3 * n].reshape(n, 3)
        v = y[3 * n:].reshape(n, 3)
        acc = _accelerations_raw(m, d4, e, q, v, c2, n)
        return np.concatenate([v.ravel(), acc.ravel()])

    def monitor(t, y, f):
        q = y[:3 * n].reshape(n, 3)
        for i in range(n):
            for j in range(i + 1, n):
                if float(np.linalg.norm(q[i] - q[j])) < collision_radius:
                    raise StopIntegration("collision")

    y0 = np.concatenate([state0.positions().ravel(), state0.velocities().ravel()])
    sol = solve_rk45(fun, float(t_span[0]), y0, float(t_span[1]), controls,
                     monitor=monitor)
    ns = len(sol.t)
    q = sol.y[:, :3 * n].reshape(ns, n, 3)
    v = sol.y[:, 3 * n:].reshape(ns, n, 3)
    energy = np.empty(ns)
    momentum = np.empty((ns, 3))
    for i in range(ns):
        st = _with_state(state0, q[i], v[i])
        energy[i] = darwin_energy(st)
        momentum[i] = darwin_momenta(st).sum(axis=0)
    return ManyBodyTrajectory(t=sol.t, q=q, v=v, energy=energy, momentum=momentum,
                              collision_halt=sol.stop_reason == "collision",
                              stop_reason=sol.stop_reason)


# --- fully retarded two-body oracle -----------------------------------------

class _History:
    """Dense per-particle history with straight-line pre-history."""

    def __init__(self, t0, q0, v0):
        self.t = [float(t0)]
        self.q = [np.asarray(q0, float).copy()]
        self.v = [np.asarray(v0, float).copy()]
        self.a = [np.zeros(3)]
        self._t0 = float(t0)

    def append(self, t, q, v, a):
        if t > self.t[-1]:
            self.t.append(float(t))
            self.q.append(q.copy())
            self.v.append(v.copy())
            self.a.append(a.copy())

    def eval(self, t):
        if t <= self._t0:
            return (self.q[0] + self.v[0] * (t - self._t0), self.v[0],
                    np.zeros(3))
        ts = self.t
        i = int(np.searchsorted(ts, t, side="right")) - 1
        i = min(max(i, 0), len(ts) - 2)
        ta, tb = ts[i], ts[i + 1]
        h = tb - ta
        s = (t - ta) / h if h > 0 else 0.0
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        qv = h00 * self.q[i] + h10 * h * self.v[i] \
            + h01 * self.q[i + 1] + h11 * h * self.v[i + 1]
        vv = h00 * self.v[i] + h10 * h * self.a[i] \
            + h01 * self.v[i + 1] + h11 * h * self.a[i + 1]
        av = (1 - s) * self.a[i] + s * self.a[i + 1]
        return qv, vv, av


def retarded_lorentz_force_per_charge(model_src: ChargeModel, hist: _History,
                                      c: float, x, t, v_obs) -> np.ndarray:
    """(E + v_obs/c x B) of the source's retarded point field at (x, t)."""
    x = np.asarray(x, float)
    s = t
    for _ in range(500):
        qs, _, _ = hist.eval(s)
        s_new = t - float(np.linalg.norm(x - qs)) / c
        if abs(s_new - s) <= 1e-14 * (1.0 + abs(t)):
            s = s_new
            break
        s = s_new
    else:
        raise RetardedSolveError("two-body retarded time did not converge")
    qs, vs, as_ = hist.eval(s)
    r = x - qs
    d = float(np.linalg.norm(r))
    if d == 0.0:
        raise RetardedSolveError("observer on the source world line")
    n = r / d
    vb = vs / c
    one_nv = 1.0 - float(n @ vb)
    pref = model_src.e / (4.0 * math.pi)
    e_near = pref * (1.0 - float(vb @ vb)) * (n - vb) / (one_nv**3 * d * d)
    e_far = pref * np.cross(n, np.cross(n - vb, as_ / c)) / (one_nv**3 * d * c)
    e_tot = e_near + e_far
    b_tot = np.cross(n, e_tot)
    return e_tot + np.cross(np.asarray(v_obs, float) / c, b_tot)


def _mass_solve(model: ChargeModel, c: float, v, force):
    """a = m(v)^-1 F with the velocity-dependent effective mass."""
    vb = np.asarray(v, float) / c
    if isinstance(model.form_factor, PointLimit):
        u2 = float(vb @ vb)
        gamma = 1.0 / math.sqrt(1.0 - u2)
        rhs = force - vb * float(vb @ force)
        return rhs / (model.m0 * gamma)
    return effective_mass_matrix(model, vb).solve(np.asarray(force, float))


def retarded_twobody_oracle(state0: ManyBodyState, t_span,
                            controls: StepControls = StepControls(),
                            collision_radius: float | None = None,
                            forces_out: list | None = None) -> ManyBodyTrajectory:
    """Integrate two charges under mutual retarded point-charge fields.

    Straight-line pre-history; the effective velocity-dependent mass of each
    particle multiplies its acceleration.  With forces_out a list, (t, force
    on body 0, q, v) is appended at every accepted step for force-level
    comparisons against the conservative dynamics.
    """
    if state0.n != 2:
        raise PhysicsError("the retarded oracle is a two-body integrator")
    c = state0.c
    t0, t1 = float(t_span[0]), float(t_span[1])
    b0, b1 = state0.bodies
    hists = [_History(t0, b0.q, b0.v), _History(t0, b1.q, b1.v)]
    if collision_radius is None:
        collision_radius = 1e-3 * float(np.linalg.norm(b0.q - b1.q))

    def force_on(i, t, q, v):
        j = 1 - i
        per_charge = retarded_lorentz_force_per_charge(
            state0.bodies[j].model, hists[j], c, q[i], t, v[i])
        return state0.bodies[i].model.e * per_charge

    def fun(t, y):
        q = y[0:6].reshape(2, 3)
        v = y[6:12].reshape(2, 3)
        a0 = _mass_solve(b0.model, c, v[0], force_on(0, t, q, v))
        a1 = _mass_solve(b1.model, c, v[1], force_on(1, t, q, v))
        return np.concatenate([v[0], v[1], a0, a1])

    def monitor(t, y, f):
        q = y[0:6].reshape(2, 3)
        v = y[6:12].reshape(2, 3)
        acc = f[6:12].reshape(2, 3)
        for i in range(2):
            hists[i].append(t, q[i], v[i], acc[i])
        if float(np.linalg.norm(q[0] - q[1])) < collision_radius:
            raise StopIntegration("collision")
        if forces_out is not None:
            forces_out.append((t, force_on(0, t, q, v), q.copy(), v.copy()))

    y0 = np.concatenate([state0.positions().ravel(), state0.velocities().ravel()])
    sol = solve_rk45(fun, t0, y0, t1, controls, monitor=monitor)
    ns = len(sol.t)
    q = sol.y[:, 0:6].reshape(ns, 2, 3)
    v = sol.y[:, 6:12].reshape(ns, 2, 3)
    return ManyBodyTrajectory(t=sol.t, q=q, v=v, energy=np.zeros(ns),
                              momentum=np.zeros((ns, 3)),
                              collision_halt=sol.stop_reason == "collision",
                              stop_reason=sol.stop_reason)

import math

import numpy as np
import pytest

from radreact.darwin import (BodySpec, ManyBodyState, coulomb_forces,
                             darwin_accelerations, darwin_energy,
                             darwin_forces, darwin_lagrangian,
                             darwin_lagrangian_terms,
                             darwin_mechanical_forces, darwin_momenta,
                             integrate_darwin, retarded_twobody_oracle)
from radreact.errors import PhysicsError
from radreact.integrate import StepControls
from radreact.units import ChargeModel


def pair(qs, vs, c=1.0, charges=(1.0, -1.0), masses=(1.0, 1.5)):
    bodies = tuple(BodySpec(ChargeModel(e=ch, m0=m), q, v)
                   for ch, m, q, v in zip(charges, masses, qs, vs))
    return ManyBodyState(bodies=bodies, c=c)


def random_pair(rng, c=1.0):
    qs = [rng.uniform(-1, 1, 3), rng.uniform(2, 3, 3)]
    vs = [rng.uniform(-0.2, 0.2, 3), rng.uniform(-0.2, 0.2, 3)]
    return pair(qs, vs, c=c)


def test_static_pair_is_coulomb_with_newtons_third_law():
    st = pair([np.zeros(3), np.array([2.0, 0, 0])],
              [np.zeros(3), np.zeros(3)])
    f = darwin_forces(st)
    # opposite charges at distance 2: force on body 0 points toward body 1
    mag = 1.0 / (16.0 * math.pi)
    assert np.allclose(f[0], [mag, 0, 0], rtol=1e-14)
    assert np.allclose(f[0] + f[1], 0.0, atol=1e-18)
    assert np.allclose(f[0], coulomb_forces(st)[0], rtol=1e-14)
    terms = darwin_lagrangian_terms(st)
    assert terms["T1"] == 0.0 and terms["U1"] == 0.0
    assert abs(terms["U0"] - (-1.0) / (8.0 * math.pi)) < 1e-15


def test_velocity_potential_structure_and_symmetry():
    # two equal charges moving perpendicular to the separation
    v = np.array([0, 0.2, 0])
    st = pair([np.zeros(3), np.array([1.5, 0, 0])], [v, v], charges=(1.0, 1.0))
    terms = darwin_lagrangian_terms(st)
    coul = 1.0 / (4 * math.pi * 1.5)
    assert abs(terms["U1"] + 0.5 * coul * float(v @ v)) < 1e-15
    # exchange symmetry of the pair terms
    st_sw = pair([np.array([1.5, 0, 0]), np.zeros(3)], [v, v], charges=(1.0, 1.0),
                 masses=(1.5, 1.0))
    assert abs(darwin_lagrangian_terms(st_sw)["U1"] - terms["U1"]) < 1e-16
    # all velocities zero kills both first-order pieces
    st0 = pair([np.zeros(3), np.array([1.5, 0, 0])],
               [np.zeros(3), np.zeros(3)])
    t0 = darwin_lagrangian_terms(st0)
    assert t0["T1"] == 0.0 and t0["U1"] == 0.0


def test_forces_and_momenta_match_lagrangian_derivatives():
    rng = np.random.default_rng(30)
    h = 1e-6
    for _ in range(10):
        st = random_pair(rng)
        qs = [b.q.copy() for b in st.bodies]
        vs = [b.v.copy() for b in st.bodies]
        F = darwin_forces(st)
        P = darwin_momenta(st)
        for k in range(2):
            for comp in range(3):
                dq = [q.copy() for q in qs]
                dq[k][comp] += h
                lp = darwin_lagrangian(pair(dq, vs))
                dq[k][comp] -= 2 * h
                lm = darwin_lagrangian(pair(dq, vs))
                fd = (lp - lm) / (2 * h)
                assert abs(F[k][comp] - fd) < 1e-8 * max(abs(fd), 1e-4)
                dv = [v.copy() for v in vs]
                dv[k][comp] += h
                lp = darwin_lagrangian(pair(qs, dv))
                dv[k][comp] -= 2 * h
                lm = darwin_lagrangian(pair(qs, dv))
                fd = (lp - lm) / (2 * h)
                assert abs(P[k][comp] - fd) < 1e-8 * max(abs(fd), 1e-4)


def test_accelerations_satisfy_euler_lagrange():
    # d/dt (dL/dv) along the solved flow equals dL/dr
    rng = np.random.default_rng(31)
    st = random_pair(rng)

    def advance(state, dt):
        acc = darwin_accelerations(state)
        qs = [b.q + b.v * dt + 0.5 * acc[i] * dt * dt
              for i, b in enumerate(state.bodies)]
        vs = [b.v + acc[i] * dt for i, b in enumerate(state.bodies)]
        return pair(qs, vs)

    h = 1e-6
    dpdt = (darwin_momenta(advance(st, h)) - darwin_momenta(advance(st, -h))) / (2 * h)
    assert np.max(np.abs(dpdt - darwin_forces(st))) < 1e-9


def test_total_momentum_rate_vanishes():
    rng = np.random.default_rng(32)
    for _ in range(10):
        st = random_pair(rng)
        assert np.max(np.abs(darwin_forces(st).sum(axis=0))) < 1e-12


def test_forces_approach_coulomb_as_c_squared():
    rng = np.random.default_rng(33)
    st = random_pair(rng)
    fc = coulomb_forces(st)
    cs = [10.0, 20.0, 40.0]
    errs = [np.max(np.abs(darwin_forces(
        pair([b.q for b in st.bodies], [b.v for b in st.bodies], c=c)) - fc))
        for c in cs]
    slope = np.polyfit(np.log(cs), np.log(errs), 1)[0]
    assert abs(slope + 2.0) < 0.1


def test_integration_conserves_energy_and_momentum():
    # repulsive pass so no collision is possible
    st = pair([np.zeros(3), np.array([2.0, 0.5, 0])],
              [np.array([0.08, 0.02, 0.01]), np.array([-0.06, 0.0, 0.02])],
              charges=(1.0, 1.0))
    tr = integrate_darwin(st, (0, 40.0))
    assert not tr.collision_halt
    assert np.max(np.abs(tr.energy - tr.energy[0])) < 1e-8 * abs(tr.energy[0])
    assert np.max(np.abs(tr.momentum - tr.momentum[0])) < 1e-10


def test_single_particle_moves_straight():
    st = ManyBodyState(bodies=(BodySpec(ChargeModel(e=1.0, m0=1.0),
                                        [0, 0, 0], [0.1, 0.05, 0]),))
    tr = integrate_darwin(st, (0, 10.0))
    assert np.allclose(tr.q[-1, 0], [1.0, 0.5, 0.0], atol=1e-12)


def test_attractive_head_on_halts_with_collision():
    # weak charges so the pair stays nonrelativistic down to the halt radius
    st = pair([np.zeros(3), np.array([1.0, 0, 0])],
              [np.array([0.01, 0, 0]), np.array([-0.01, 0, 0])],
              charges=(0.05, -0.05))
    tr = integrate_darwin(st, (0, 2000.0), collision_radius=0.02)
    assert tr.collision_halt
    sep = np.linalg.norm(tr.q[-1, 0] - tr.q[-1, 1])
    assert sep < 0.03


def test_coincident_positions_rejected():
    with pytest.raises(PhysicsError):
        pair([np.zeros(3), np.zeros(3)], [np.zeros(3), np.zeros(3)])


def test_retarded_oracle_static_pair_reproduces_coulomb():
    st = pair([np.zeros(3), np.array([2.0, 0, 0])], [np.zeros(3), np.zeros(3)],
              charges=(0.02, 0.02))
    forces = []
    retarded_twobody_oracle(st, (0, 0.5), StepControls(rtol=1e-10, atol=1e-14),
                            forces_out=forces)
    f_coul = coulomb_forces(st)[0]
    for (_, f_ret, _, _) in forces:
        # motion is tiny, so the retarded force stays at the Coulomb value
        assert np.linalg.norm(f_ret - f_coul) < 1e-6 * np.linalg.norm(f_coul)


def test_retarded_oracle_history_resolution_stability():
    st = pair([np.zeros(3), np.array([2.0, 0.4, 0])],
              [np.array([0.05, 0.02, 0]), np.array([-0.05, 0, 0])],
              charges=(0.4, 0.4))
    base = retarded_twobody_oracle(st, (0, 8.0),
                                   StepControls(rtol=1e-10, atol=1e-13,
                                                max_step=0.05))
    fine = retarded_twobody_oracle(st, (0, 8.0),
                                   StepControls(rtol=1e-10, atol=1e-13,
                                                max_step=0.025))
    scale = np.max(np.abs(base.q[-1]))
    assert np.max(np.abs(base.q[-1] - fine.q[-1])) < 1e-8 * scale


def _geometry_scaled_encounter(speed_scale, c=1.0):
    """Self-similar passing encounter: d ~ 1/v^2 keeps energies comparable."""
    s = speed_scale
    d = 2.0 / (s * s)
    b_imp = 0.8 / (s * s)
    v0 = 0.12 * s
    return pair([np.array([-d, -b_imp / 2, 0]), np.array([d, b_imp / 2, 0])],
                [np.array([v0, 0, 0]), np.array([-v0, 0, 0])],
                charges=(0.4, 0.4), masses=(1.0, 1.0), c=c)


def test_darwin_captures_full_v2_correction_of_retarded_force():
    # |F_ret - F_darwin| / |F_darwin - F_coulomb| -> 0 linearly in the speed
    ratios = []
    scales = [1.0, 0.5, 0.25]
    for s in scales:
        st = _geometry_scaled_encounter(s)
        horizon = 35.0 / s**3
        forces = []
        retarded_twobody_oracle(st, (0, horizon),
                                StepControls(rtol=1e-9, atol=1e-12,
                                             max_step=0.02 / s**3),
                                forces_out=forces)
        num = den = 0.0
        for (t, f_ret, q, v) in forces[1:]:
            snap = pair([q[0], q[1]], [v[0], v[1]], charges=(0.4, 0.4),
                        masses=(1.0, 1.0), c=st.c)
            f_dar = darwin_mechanical_forces(snap)[0]
            f_cou = coulomb_forces(snap)[0]
            num = max(num, float(np.linalg.norm(f_ret - f_dar)))
            den = max(den, float(np.linalg.norm(f_dar - f_cou)))
        ratios.append(num / den)
    exponent = np.polyfit(np.log(scales), np.log(ratios), 1)[0]
    assert 0.7 < exponent < 1.3

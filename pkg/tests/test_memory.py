import math

import numpy as np
import pytest

from radreact.errors import PhysicsError
from radreact.fields import harmonic_central, zero_field
from radreact.lorentz_dirac import integrate_backward
from radreact.memory_force import (HistoryFunction, MemoryKernel,
                                   dde_energy_functional, delay_coefficient,
                                   delay_rhs, integrate_dde,
                                   taylor_reduced_coefficients,
                                   taylor_reduced_ld_model)
from radreact.units import ChargeModel, PointLimit, SphereShell, UniformBall


@pytest.fixture
def shell():
    return ChargeModel(e=1.3, m0=2.0, form_factor=SphereShell(0.4), m_b=0.5)


@pytest.fixture
def ball():
    return ChargeModel(e=1.3, m0=2.0, form_factor=UniformBall(0.4), m_b=0.5)


def test_kernel_values_at_zero(shell, ball):
    ks, kb = MemoryKernel(shell), MemoryKernel(ball)
    ref = shell.e**2 / (8 * math.pi * 0.4)
    assert ks.h(0.0) == ref
    assert abs(kb.h(0.0) - 1.2 * ref) < 1e-10 * ref


def test_kernel_support_and_evenness(shell, ball):
    rng = np.random.default_rng(20)
    for k in (MemoryKernel(shell), MemoryKernel(ball)):
        assert k.h(2 * 0.4) == 0.0
        assert k.h(-2 * 0.4) == 0.0
        assert k.h(0.81) == 0.0
        for _ in range(30):
            w = rng.uniform(-1.2, 1.2)
            assert abs(k.h(w) - k.h(-w)) < 1e-12 * max(abs(k.h(w)), 1e-30)


def test_kernel_matches_formfactor_quadrature(shell, ball):
    for k in (MemoryKernel(shell), MemoryKernel(ball)):
        h0 = k.h(0.0)
        ws = [0.0, 0.1, 0.25, 0.39, 0.55, 0.7]
        for w in ws:
            oracle = k.h_from_formfactor_quadrature(w)
            assert abs(oracle - k.h(w)) < 1e-6 * h0
        # integral of h over the support agrees between routes
        closed = k.h_integral_quadrature()
        oracle_int = k.h_integral_from_formfactor()
        assert abs(closed - oracle_int) < 1e-6 * abs(closed)


def test_w_t_reconstruction(shell):
    k = MemoryKernel(shell)
    rng = np.random.default_rng(21)
    for _ in range(30):
        x = rng.uniform(0.01, 1.2)
        t = rng.uniform(-1.2, 1.2)
        direct = (k.h(x + t) - k.h(x - t)) / x
        assert abs(k.w_t(x, t) - direct) < 1e-12 * max(abs(direct), 1e-30)


def test_finite_memory_support(shell):
    # W_tau(q(t)-q(t-tau)) = 0 whenever tau >= 2R/(1 - vbar)
    k = MemoryKernel(shell)
    vbar = 0.5
    tau_min = 2 * 0.4 / (1 - vbar)
    rng = np.random.default_rng(22)
    for _ in range(50):
        tau = tau_min * rng.uniform(1.0, 3.0)
        dq = rng.uniform(0, vbar * tau)   # |q(t) - q(t - tau)| <= vbar tau
        assert k.w_t(dq, tau) == 0.0


def test_taylor_coefficients(shell):
    m_ren, jerk = taylor_reduced_coefficients(shell)
    R = 0.4
    e2 = shell.e**2
    # first-order lag term is the mass shift, second order the jerk strength
    assert abs(delay_coefficient(shell) * 2 * R - e2 / (6 * math.pi * R)) < 1e-15
    assert abs(delay_coefficient(shell) * (2 * R) ** 2 / 2 - e2 / (6 * math.pi)) < 1e-15
    assert abs(m_ren - (shell.m_b + e2 / (6 * math.pi * R))) < 1e-15
    assert abs(jerk - e2 / (6 * math.pi)) < 1e-18
    # mass shift vanishes as the charge spreads out
    big = ChargeModel(e=1.3, m0=2.0, form_factor=SphereShell(1e6), m_b=0.5)
    assert abs(taylor_reduced_coefficients(big)[0] - 0.5) < 1e-6


def test_constant_history_zero_field_is_stationary(shell):
    hist = HistoryFunction.constant([0, 0, 0], [0.02, 0.01, 0.0], window=0.8)
    tr = integrate_dde(shell, zero_field(), hist, (0, 5.0))
    assert np.max(np.abs(tr.v - np.array([0.02, 0.01, 0.0]))) == 0.0
    # delay_rhs vanishes identically for equal current and delayed velocity
    a = delay_rhs(shell, zero_field(), [0, 0, 0], [0.02, 0, 0], [0.02, 0, 0])
    assert np.allclose(a, 0.0, atol=1e-18)


def test_history_window_too_short_rejected(shell):
    hist = HistoryFunction.constant([0, 0, 0], [0, 0, 0], window=0.3)
    with pytest.raises(PhysicsError):
        integrate_dde(shell, zero_field(), hist, (0, 1.0))


def test_ball_rejected_for_single_lag_equation():
    ball = ChargeModel(e=1.3, m0=2.0, form_factor=UniformBall(0.4), m_b=0.5)
    hist = HistoryFunction.constant([0, 0, 0], [0, 0, 0], window=0.8)
    with pytest.raises(PhysicsError):
        integrate_dde(ball, zero_field(), hist, (0, 1.0))
    with pytest.raises(PhysicsError):
        MemoryKernel(ChargeModel(e=1.0, m0=1.0, form_factor=PointLimit()))


def test_harmonic_dde_damping_rate(shell):
    # amplitude envelope decays at e^2 w0^2 / (12 pi M), within 20 percent
    m_ren, _ = taylor_reduced_coefficients(shell)
    w0 = 1.0
    fld = harmonic_central(m_ren, shell.e, w0)
    hist = HistoryFunction.constant([0.4, 0, 0], [0, 0, 0], window=0.8)
    T = 60.0
    tr = integrate_dde(shell, fld, hist, (0, T))
    x = tr.q[:, 0]
    # fit the envelope through the oscillation peaks
    peaks = [i for i in range(1, len(x) - 1)
             if x[i] > x[i - 1] and x[i] > x[i + 1] and x[i] > 0.05]
    rate = -np.polyfit(tr.t[peaks], np.log(x[peaks]), 1)[0]
    predicted = shell.e**2 * w0**2 / (12 * math.pi * m_ren)
    assert abs(rate - predicted) < 0.2 * predicted


def test_lyapunov_functional_identity(shell):
    m_ren, _ = taylor_reduced_coefficients(shell)
    fld = harmonic_central(m_ren, shell.e, 1.0)
    hist = HistoryFunction.constant([0.5, 0, 0], [0, 0, 0], window=0.8)
    tr = integrate_dde(shell, fld, hist, (0, 30.0))
    energy = dde_energy_functional(shell, fld, tr)
    # E(t) + dissipated(t) is constant along the run
    resid = (energy[-1] - energy[0]) + (tr.radiated[-1] - tr.radiated[0])
    assert abs(resid) < 1e-5 * abs(energy[0])
    # dissipation is monotone
    assert np.all(np.diff(tr.radiated) >= -1e-15)


def test_dde_converges_to_taylor_reduced_dynamics():
    # error against the local third-order physical branch shrinks ~ R
    M, e, w0, amp, T = 2.0, 0.9, 1.0, 0.02, 25.0
    radii = [0.16, 0.08, 0.04]
    errs = []
    for R in radii:
        m_b = M - e**2 / (6 * math.pi * R)
        cm = ChargeModel(e=e, m0=M, form_factor=SphereShell(R), m_b=m_b)
        fld = harmonic_central(M, e, w0)
        hist = HistoryFunction.constant([amp, 0, 0], [0, 0, 0], window=2 * R)
        dde = integrate_dde(cm, fld, hist, (0, T))
        ld = taylor_reduced_ld_model(cm, fld)
        bwd = integrate_backward(ld, dde.q[-1], dde.v[-1], T)
        # compare beyond the initial self-force build-up window
        mask = dde.t >= 1.0
        qa, _, _ = bwd.sample_qva(dde.t[mask])
        errs.append(np.max(np.abs(qa[:, 0] - dde.q[mask, 0])) / amp)
    exponent = np.polyfit(np.log(radii), np.log(errs), 1)[0]
    assert 0.7 < exponent < 1.3

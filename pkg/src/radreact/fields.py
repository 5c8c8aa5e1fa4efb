"""External electromagnetic environments with analytic first derivatives.

Every map evaluates E(x), B(x), their 3x3 spatial gradients, and the
electrostatic potential phi(x) used by the energy diagnostics.  Gradients are
part of the contract because the first-order correction to the effective
dynamics needs (v . grad)(E + v x B); maps built from user callables that
lack analytic derivatives fall back to central differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PhysicsError

Vec = np.ndarray


@dataclass(frozen=True)
class FieldMap:
    e_field: Callable[[Vec], Vec]
    b_field: Callable[[Vec], Vec]
    grad_e: Callable[[Vec], np.ndarray]   # grad_e(x)[i, j] = dE_i/dx_j
    grad_b: Callable[[Vec], np.ndarray]
    potential: Callable[[Vec], float]     # electrostatic potential phi(x)
    analytic_gradients: bool = True
    uniform_b: Vec | None = None          # set when E = 0 and B is constant

    def lorentz_force(self, e_charge: float, q: Vec, v: Vec) -> Vec:
        return e_charge * (self.e_field(q) + np.cross(v, self.b_field(q)))


def _fd_gradient(f: Callable[[Vec], Vec]) -> Callable[[Vec], np.ndarray]:
    """Central-difference 3x3 gradient with step h = max(1e-6, 1e-6 |x|)."""

    def grad(x):
        x = np.asarray(x, dtype=float)
        h = max(1e-6, 1e-6 * float(np.linalg.norm(x)))
        out = np.empty((3, 3))
        for j in range(3):
            dx = np.zeros(3)
            dx[j] = h
            out[:, j] = (np.asarray(f(x + dx)) - np.asarray(f(x - dx))) / (2.0 * h)
        return out

    return grad


_ZERO3 = np.zeros(3)
_ZERO33 = np.zeros((3, 3))


def zero_field() -> FieldMap:
    return FieldMap(
        e_field=lambda x: _ZERO3.copy(),
        b_field=lambda x: _ZERO3.copy(),
        grad_e=lambda x: _ZERO33.copy(),
        grad_b=lambda x: _ZERO33.copy(),
        potential=lambda x: 0.0,
    )


def uniform_magnetic(b: float, axis) -> FieldMap:
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
        raise PhysicsError(f"axis must be a unit vector, |axis| = {np.linalg.norm(axis)!r}")
    b_vec = b * axis

    return FieldMap(
        e_field=lambda x: _ZERO3.copy(),
        b_field=lambda x: b_vec.copy(),
        grad_e=lambda x: _ZERO33.copy(),
        grad_b=lambda x: _ZERO33.copy(),
        potential=lambda x: 0.0,
        uniform_b=b_vec,
    )


def penning_trap(mass: float, charge: float, omega_z: float, b: float) -> FieldMap:
    """Ideal trap: quadrupole e*phi = (m wz^2/2)(-x1^2/2 - x2^2/2 + x3^2) plus B z-hat.

    `mass`/`charge` fix the potential normalization; the stored B is along +z.
    """
    if omega_z <= 0 or b <= 0:
        raise PhysicsError("penning trap needs omega_z > 0 and B > 0")
    k = mass * omega_z**2 / charge
    b_vec = np.array([0.0, 0.0, b])
    ge = np.diag([0.5 * k, 0.5 * k, -k])

    def e_field(x):
        return np.array([0.5 * k * x[0], 0.5 * k * x[1], -k * x[2]])

    def potential(x):
        return 0.5 * k * (-0.5 * x[0] ** 2 - 0.5 * x[1] ** 2 + x[2] ** 2)

    return FieldMap(
        e_field=e_field,
        b_field=lambda x: b_vec.copy(),
        grad_e=lambda x: ge.copy(),
        grad_b=lambda x: _ZERO33.copy(),
        potential=potential,
    )


def central_potential(phi, dphi, d2phi, origin_limit: float | None = None) -> FieldMap:
    """Central electrostatic map E = -phi'(r) r-hat, B = 0.

    phi, dphi, d2phi are callables of r > 0.  Evaluation at r = 0 is an error
    unless `origin_limit` declares the finite limit of phi'(r)/r there.
    """

    def _ratio(r):
        # phi'(r)/r, the quantity every component of E and grad E needs
        if r == 0.0:
            if origin_limit is None:
                raise PhysicsError("central potential probed at r = 0 without a declared limit")
            return origin_limit
        return dphi(r) / r

    def e_field(x):
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        return -_ratio(r) * x

    def grad_e(x):
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0.0:
            if origin_limit is None:
                raise PhysicsError("central potential probed at r = 0 without a declared limit")
            return -origin_limit * np.eye(3)
        n = x / r
        # E = -phi' n ; dE_i/dx_j = -phi'' n_i n_j - (phi'/r)(delta_ij - n_i n_j)
        return -d2phi(r) * np.outer(n, n) - _ratio(r) * (np.eye(3) - np.outer(n, n))

    def potential(x):
        r = float(np.linalg.norm(np.asarray(x, dtype=float)))
        return phi(r)

    return FieldMap(
        e_field=e_field,
        b_field=lambda x: _ZERO3.copy(),
        grad_e=grad_e,
        grad_b=lambda x: _ZERO33.copy(),
        potential=potential,
    )


def axial_1d(phi, dphi, d2phi) -> FieldMap:
    """Potential varying only along the 1-axis: E = (-phi'(x1), 0, 0), B = 0."""

    def e_field(x):
        return np.array([-dphi(float(x[0])), 0.0, 0.0])

    def grad_e(x):
        g = np.zeros((3, 3))
        g[0, 0] = -d2phi(float(x[0]))
        return g

    return FieldMap(
        e_field=e_field,
        b_field=lambda x: _ZERO3.copy(),
        grad_e=grad_e,
        grad_b=lambda x: _ZERO33.copy(),
        potential=lambda x: phi(float(x[0])),
    )


def harmonic_central(mass: float, charge: float, omega0: float) -> FieldMap:
    """phi(r) = (m w0^2 / 2e) r^2, so E = -(m w0^2/e) x."""
    k = mass * omega0**2 / charge
    return central_potential(
        phi=lambda r: 0.5 * k * r * r,
        dphi=lambda r: k * r,
        d2phi=lambda r: k,
        origin_limit=k,
    )


def from_callables(e_field, b_field, potential,
                   grad_e=None, grad_b=None) -> FieldMap:
    """Wrap raw field callables; missing gradients use central differences."""
    analytic = grad_e is not None and grad_b is not None
    return FieldMap(
        e_field=e_field,
        b_field=b_field,
        grad_e=grad_e if grad_e is not None else _fd_gradient(e_field),
        grad_b=grad_b if grad_b is not None else _fd_gradient(b_field),
        potential=potential,
        analytic_gradients=analytic,
    )


def superpose(maps: list[FieldMap]) -> FieldMap:
    if not maps:
        raise PhysicsError("superpose needs a nonempty list of maps")
    maps = list(maps)

    return FieldMap(
        e_field=lambda x: sum((m.e_field(x) for m in maps), start=np.zeros(3)),
        b_field=lambda x: sum((m.b_field(x) for m in maps), start=np.zeros(3)),
        grad_e=lambda x: sum((m.grad_e(x) for m in maps), start=np.zeros((3, 3))),
        grad_b=lambda x: sum((m.grad_b(x) for m in maps), start=np.zeros((3, 3))),
        potential=lambda x: sum(m.potential(x) for m in maps),
        analytic_gradients=all(m.analytic_gradients for m in maps),
    )

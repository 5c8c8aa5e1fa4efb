"""Mode structure and radiative damping of the ideal Penning trap.

The axial motion is a damped oscillator; the in-plane motion splits into the
cyclotron and magnetron modes whose damping cannot be guessed from energy
bookkeeping alone (the magnetron mode grows).  A dense 4x4 eigen-oracle
built from the linearized in-plane blocks cross-checks the first-order
perturbation formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityBoundaryError, PhysicsError
from .units import ChargeModel, cyclotron_frequency


@dataclass(frozen=True)
class TrapSpec:
    charge: ChargeModel
    omega_z: float
    b_field: float

    def __post_init__(self):
        if self.omega_z <= 0:
            raise PhysicsError("axial frequency must be positive")
        if self.b_field <= 0:
            raise PhysicsError("trap field must be positive")

    @property
    def omega_c(self) -> float:
        return cyclotron_frequency(self.charge, self.b_field)

    @property
    def lam(self) -> float:
        """Dimensionless field ratio omega_c / omega_z."""
        return self.omega_c / self.omega_z

    def validity(self, v_max: float, r_max: float) -> dict:
        """Small-velocity and trap-size conditions for the linearized modes."""
        return {
            "velocity_ok": v_max < 0.1,
            "radius_ok": r_max < 0.1 * self.omega_c / self.omega_z**2,
        }


@dataclass(frozen=True)
class ModeReport:
    omega_plus: float
    omega_minus: float
    omega_z: float
    gamma_plus: float    # > 0: cyclotron friction
    gamma_minus: float   # < 0: magnetron antifriction
    gamma_z: float       # axial velocity-damping coefficient

    @property
    def lifetimes(self) -> dict:
        return {
            "cyclotron": 1.0 / abs(self.gamma_plus),
            "magnetron": 1.0 / abs(self.gamma_minus),
            "axial": 1.0 / abs(self.gamma_z),
        }


def critical_field(charge: ChargeModel, omega_z: float) -> float:
    """Field at which the in-plane motion loses stability: omega_c = sqrt(2) omega_z."""
    if omega_z <= 0:
        raise PhysicsError("axial frequency must be positive")
    return math.sqrt(2.0) * omega_z * charge.m0 / charge.e


def mode_analysis(spec: TrapSpec) -> ModeReport:
    """Frequencies and first-order radiative damping rates of the three modes."""
    wc = spec.omega_c
    wz = spec.omega_z
    disc = wc * wc - 2.0 * wz * wz
    if disc <= 0.0:
        raise InstabilityBoundaryError(
            f"lambda = {spec.lam:.6g} <= sqrt(2): in-plane motion unstable",
            critical_field=critical_field(spec.charge, wz))
    root = math.sqrt(disc)
    wp = 0.5 * (wc + root)
    # cancellation-free partner root: the product identity is exact this way
    wm = 0.5 * wz * wz / wp
    beta = spec.charge.beta
    return ModeReport(
        omega_plus=wp,
        omega_minus=wm,
        omega_z=wz,
        gamma_plus=beta * wp**3 / (wp - wm),
        gamma_minus=beta * wm**3 / (wm - wp),
        gamma_z=beta * wz * wz,
    )


def inplane_blocks(spec: TrapSpec, beta: float | None = None):
    """Linearized in-plane system d/dt (r, u) = (A + beta V)(r, u).

    Linearizing the effective equation for charge e > 0 in B = B z-hat:

        r-dot = u
        u-dot = (wz^2/2) r - wc u-perp
                - beta [ (wc^2 - wz^2/2) u + (wc wz^2 / 2) r-perp ]

    The rotation chirality and the r-perp friction term must come from the
    same sign of e*B; with this pairing first-order perturbation in beta
    reproduces the gamma_plus/gamma_minus damping formulas exactly.
    """
    wc = spec.omega_c
    wz = spec.omega_z
    if beta is None:
        beta = spec.charge.beta
    perp = np.array([[0.0, -1.0], [1.0, 0.0]])  # P u = u-perp
    eye = np.eye(2)
    a = np.zeros((4, 4))
    a[0:2, 2:4] = eye
    a[2:4, 0:2] = 0.5 * wz * wz * eye
    a[2:4, 2:4] = -wc * perp
    v = np.zeros((4, 4))
    v[2:4, 0:2] = -0.5 * wc * wz * wz * perp
    v[2:4, 2:4] = -(wc * wc - 0.5 * wz * wz) * eye
    return a, beta * v


def numeric_eigen_oracle(spec: TrapSpec, beta: float | None = None) -> np.ndarray:
    """Four eigenvalues of the in-plane matrix A + beta V (dense solve).

    Sorted by imaginary part; at beta = 0 they are +-i omega_plus/minus, and
    for small beta the real parts approach -gamma_plus (cyclotron pair,
    decaying) and -gamma_minus (magnetron pair, growing).
    """
    a, bv = inplane_blocks(spec, beta)
    vals = np.linalg.eigvals(a + bv)
    return vals[np.argsort(vals.imag)]

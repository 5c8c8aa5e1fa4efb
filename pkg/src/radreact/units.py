"""Unit conventions, particle presets, and the adiabatic bookkeeping parameter.

Internally everything is expressed in natural Heaviside-Lorentz units with
c = 1 and epsilon_0 = 1.  A :class:`UnitSystem` fixes the two remaining free
scales (time and energy) and converts SI/Gaussian inputs at the boundary.
All derived constants (beta, self-energies, cyclotron frequencies) are
computed from (e, m0, c); none of the shortcut numbers floating around the
literature are baked in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import PhysicsError

# CODATA 2018 (SI)
C_SI = 299792458.0                  # m/s, exact
E_CHARGE_SI = 1.602176634e-19       # C, exact
EPSILON0_SI = 8.8541878128e-12      # F/m
MU0_SI = 1.25663706212e-6           # N/A^2
ELECTRON_MASS_SI = 9.1093837015e-31  # kg
PROTON_MASS_SI = 1.67262192369e-27   # kg
GAUSS_TO_TESLA = 1e-4


@dataclass(frozen=True)
class UnitSystem:
    """Natural Heaviside-Lorentz units: c = 1 exactly, epsilon_0 = 1.

    time_unit: seconds per internal time unit.
    energy_unit: joules per internal energy unit (masses are energies, c = 1).
    Lengths follow from c: length_unit = c * time_unit.
    Charges follow from epsilon_0 = 1: e_int = e_SI / sqrt(eps0 * E0 * L0).
    """

    time_unit: float = 1.0
    energy_unit: float = ELECTRON_MASS_SI * C_SI**2

    @property
    def c(self) -> float:
        return 1.0

    @property
    def length_unit(self) -> float:
        """Meters per internal length unit."""
        return C_SI * self.time_unit

    @property
    def charge_unit(self) -> float:
        """Coulombs per internal (Heaviside-Lorentz) charge unit."""
        return math.sqrt(EPSILON0_SI * self.energy_unit * self.length_unit)

    @property
    def bfield_unit(self) -> float:
        """Tesla per internal magnetic field unit (B^2/2 is an energy density)."""
        return math.sqrt(MU0_SI * self.energy_unit / self.length_unit**3)

    @property
    def efield_unit(self) -> float:
        """V/m per internal electric field unit."""
        return self.bfield_unit * C_SI

    # --- conversions (from SI into internal units) ---
    def time_from_si(self, seconds):
        return seconds / self.time_unit

    def time_to_si(self, t):
        return t * self.time_unit

    def length_from_si(self, meters):
        return meters / self.length_unit

    def length_to_si(self, x):
        return x * self.length_unit

    def energy_from_si(self, joules):
        return joules / self.energy_unit

    def mass_from_si(self, kilograms):
        return kilograms * C_SI**2 / self.energy_unit

    def charge_from_si(self, coulombs):
        return coulombs / self.charge_unit

    def bfield_from_si(self, tesla):
        return tesla / self.bfield_unit

    def bfield_from_gauss(self, gauss):
        return self.bfield_from_si(gauss * GAUSS_TO_TESLA)

    def bfield_to_gauss(self, b):
        return b * self.bfield_unit / GAUSS_TO_TESLA

    def frequency_to_si(self, omega):
        """Angular frequency, internal -> rad/s."""
        return omega / self.time_unit

    def frequency_from_si(self, omega_si):
        return omega_si * self.time_unit

    def velocity_from_si(self, meters_per_second):
        return meters_per_second / C_SI


#: Default: time in seconds, energies in electron rest energies.  With this
#: choice the electron has m0 = 1 and beta comes out directly in seconds.
DEFAULT_UNITS = UnitSystem()


# --- form factors ---------------------------------------------------------

@dataclass(frozen=True)
class PointLimit:
    """Point charge: no internal structure, infinite electrostatic energy."""

    def fourier(self, k):
        return 1.0

    @property
    def radius(self):
        return 0.0


@dataclass(frozen=True)
class SphereShell:
    """Charge uniformly spread on a sphere of radius `radius`."""

    radius: float

    def fourier(self, k):
        """Normalized form factor F(k) with F(0) = 1."""
        kr = k * self.radius
        if abs(kr) < 1e-4:
            return 1.0 - kr * kr / 6.0 + kr**4 / 120.0
        return math.sin(kr) / kr

    def electrostatic_self_energy(self, e):
        return e * e / (8.0 * math.pi * self.radius)


@dataclass(frozen=True)
class UniformBall:
    """Charge uniformly distributed over a ball of radius `radius`."""

    radius: float

    def fourier(self, k):
        kr = k * self.radius
        if abs(kr) < 1e-3:
            return 1.0 - kr * kr / 10.0 + kr**4 / 280.0
        return 3.0 * (math.sin(kr) - kr * math.cos(kr)) / kr**3

    def electrostatic_self_energy(self, e):
        # (1/2) int rho rho' / (4 pi |x-x'|) for the uniform ball
        return 0.6 * e * e / (4.0 * math.pi * self.radius)


FormFactor = PointLimit | SphereShell | UniformBall


# --- charge model ---------------------------------------------------------

@dataclass(frozen=True)
class ChargeModel:
    """Particle identity: charge, masses, form factor, derived constants.

    e, m0 in internal units; m0 is the experimental rest mass.  m_b is the
    bare (mechanical) mass.  If m_b is not given it is chosen so that
    m_b + (4/3) m_e equals m0, i.e. the field contribution is absorbed into
    the observed mass; for the point limit m_b = m0.
    """

    e: float
    m0: float
    form_factor: FormFactor = field(default_factory=PointLimit)
    m_b: float | None = None
    units: UnitSystem = DEFAULT_UNITS

    def __post_init__(self):
        if self.m0 <= 0:
            raise PhysicsError(f"experimental mass must be positive, got {self.m0}")
        if not isinstance(self.form_factor, PointLimit) and self.form_factor.radius <= 0:
            raise PhysicsError("extended form factors need a positive radius")

    @property
    def beta(self) -> float:
        """Radiation-reaction time e^2/(6 pi m0), units of time (c = 1)."""
        return self.e * self.e / (6.0 * math.pi * self.m0)

    @property
    def m_e_self(self) -> float:
        """Electrostatic self-energy of the charge distribution."""
        if isinstance(self.form_factor, PointLimit):
            return math.inf
        return self.form_factor.electrostatic_self_energy(self.e)

    @property
    def bare_mass(self) -> float:
        if self.m_b is not None:
            return self.m_b
        if isinstance(self.form_factor, PointLimit):
            return self.m0
        return self.m0 - (4.0 / 3.0) * self.m_e_self

    @property
    def m_eff(self) -> float:
        """Nonrelativistic effective mass m_b + (4/3) m_e."""
        if isinstance(self.form_factor, PointLimit):
            return self.m0
        return self.bare_mass + (4.0 / 3.0) * self.m_e_self

    def beta_si(self) -> float:
        return self.units.time_to_si(self.beta)


def electron_preset(units: UnitSystem = DEFAULT_UNITS,
                    form_factor: FormFactor | None = None) -> ChargeModel:
    """Electron with CODATA charge magnitude and mass (charge taken positive)."""
    return ChargeModel(
        e=units.charge_from_si(E_CHARGE_SI),
        m0=units.mass_from_si(ELECTRON_MASS_SI),
        form_factor=form_factor if form_factor is not None else PointLimit(),
        units=units,
    )


def proton_preset(units: UnitSystem = DEFAULT_UNITS,
                  form_factor: FormFactor | None = None) -> ChargeModel:
    return ChargeModel(
        e=units.charge_from_si(E_CHARGE_SI),
        m0=units.mass_from_si(PROTON_MASS_SI),
        form_factor=form_factor if form_factor is not None else PointLimit(),
        units=units,
    )


def cyclotron_frequency(model: ChargeModel, b_field: float) -> float:
    """Angular cyclotron frequency e B / m0 (internal units, c = 1)."""
    if b_field < 0:
        raise PhysicsError("field strength must be non-negative")
    return model.e * b_field / model.m0


def reference_field_and_epsilon(model: ChargeModel, b_lab: float) -> tuple[float, float]:
    """Reference field B0 with beta * omega_c(B0) = 1, and eps = B_lab/B0."""
    if b_lab <= 0:
        raise PhysicsError("laboratory field must be positive")
    b0 = model.m0 / (model.beta * model.e)
    return b0, b_lab / b0

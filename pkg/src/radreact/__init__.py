"""Effective dynamics of classical radiating charges.

Closed-form energy-momentum relations of rigid extended charges, the
third-order radiation-reaction flow with its runaway/critical-manifold
structure, the effective second-order dynamics with worked synchrotron and
Penning-trap cases, the rigid-charge memory self-force, retarded fields and
radiated power, and Darwin N-body dynamics.
"""

from . import (cli, darwin, fields, landau_lifshitz, lorentz_dirac,
               memory_force, penning, radiation, soliton, units)
from .errors import (ConfigError, InstabilityBoundaryError, PhysicsError,
                     RadReactError, RetardedSolveError, StepSizeUnderflowError,
                     VelocityGuardError)
from .units import (ChargeModel, PointLimit, SphereShell, UniformBall,
                    UnitSystem, cyclotron_frequency, electron_preset,
                    proton_preset, reference_field_and_epsilon)

__version__ = "0.1.0"

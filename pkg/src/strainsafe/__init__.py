"""strainsafe: strain-energy safety filtering for hyperelastic actuators.

A library for encoding material safety of an incompressible Neo-Hookean
actuator as a strain-energy barrier of relative degree two and enforcing
it with a closed-form QP safety filter over simulated pressurized-tube
dynamics.
"""

from .barrier import BarrierEval, SafetySpec, barrier, barrier_rate, constraint_coefficients, psi_sequence
from .config import ConfigError, RunConfig, default_config, load_config, save_config
from .material import (
    CalibrationError,
    MaterialParams,
    PrincipalTriplet,
    SafeSetGrid,
    StretchPair,
    calibrate_mu_from_safe_energy,
    cauchy_stress,
    first_invariant,
    fit_mu_from_tensile_data,
    scan_safe_set,
    strain_energy,
    strain_energy_gradient,
    strain_energy_hessian,
    uniaxial_stress,
)
from .qp import FilterResult, InfeasibleConstraintError, filter_general, filter_scalar
from .sim import (
    NominalControlSpec,
    SimulationConfig,
    SimulationFault,
    SimulationTrace,
    replay,
    rk4_step,
    simulate,
)
from .tube import (
    ControlInput,
    StretchState,
    TubeGeometry,
    deformation_gradient,
    drift,
    elastic_force,
    enclosed_volume,
    external_force_vector,
    input_matrix,
    mass_matrix,
    state_derivative,
    viscous_force,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierEval",
    "CalibrationError",
    "ConfigError",
    "ControlInput",
    "FilterResult",
    "InfeasibleConstraintError",
    "MaterialParams",
    "NominalControlSpec",
    "PrincipalTriplet",
    "RunConfig",
    "SafeSetGrid",
    "SafetySpec",
    "SimulationConfig",
    "SimulationFault",
    "SimulationTrace",
    "StretchPair",
    "StretchState",
    "TubeGeometry",
    "barrier",
    "barrier_rate",
    "calibrate_mu_from_safe_energy",
    "cauchy_stress",
    "constraint_coefficients",
    "default_config",
    "deformation_gradient",
    "drift",
    "elastic_force",
    "enclosed_volume",
    "external_force_vector",
    "filter_general",
    "filter_scalar",
    "first_invariant",
    "fit_mu_from_tensile_data",
    "input_matrix",
    "load_config",
    "mass_matrix",
    "psi_sequence",
    "replay",
    "rk4_step",
    "save_config",
    "scan_safe_set",
    "simulate",
    "state_derivative",
    "strain_energy",
    "strain_energy_gradient",
    "strain_energy_hessian",
    "uniaxial_stress",
    "viscous_force",
]

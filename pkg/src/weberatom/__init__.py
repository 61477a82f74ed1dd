"""Vector Weber light beams and the dipole mechanics of falling two-level atoms."""

__version__ = "0.1.0"

from .backend import available_backends, backend_name, get_kernel
from .beams import (
    BeamSpec,
    calibrate_amplitude,
    dark_parabola,
    em_fields,
    find_um,
    intensity_grid,
    max_deflection_angle,
    scalar_psi,
)
from .config import (
    ConfigError,
    OutputSettings,
    RunConfig,
    SimSettings,
    emit_config,
    parse_config,
    parse_config_file,
)
from .dynamics import (
    AtomState,
    CloudConfig,
    EnsembleResult,
    TrajectoryRecord,
    a_atomic,
    acceleration,
    classify,
    deflection_angle,
    integrate,
    observables,
    run_ensemble,
    sample_cloud,
)
from .force import coupling_g, coupling_sample, mean_force, mean_force_at_rest
from .parabolic import ParabolicPoint, cart_to_parabolic, parabolic_to_cart
from .units import PhysicalSetup, detuning, detuning_natural, dipole_moment

__all__ = [
    "AtomState",
    "BeamSpec",
    "CloudConfig",
    "ConfigError",
    "EnsembleResult",
    "OutputSettings",
    "ParabolicPoint",
    "PhysicalSetup",
    "RunConfig",
    "SimSettings",
    "TrajectoryRecord",
    "__version__",
    "a_atomic",
    "acceleration",
    "available_backends",
    "backend_name",
    "calibrate_amplitude",
    "cart_to_parabolic",
    "classify",
    "coupling_g",
    "coupling_sample",
    "dark_parabola",
    "deflection_angle",
    "detuning",
    "detuning_natural",
    "dipole_moment",
    "em_fields",
    "emit_config",
    "find_um",
    "get_kernel",
    "integrate",
    "intensity_grid",
    "max_deflection_angle",
    "mean_force",
    "mean_force_at_rest",
    "observables",
    "parabolic_to_cart",
    "parse_config",
    "parse_config_file",
    "run_ensemble",
    "sample_cloud",
    "scalar_psi",
]

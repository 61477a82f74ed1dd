"""Physical constants, the two-level-atom setup, and natural-unit conversions.

Internally every trajectory quantity is carried in the beam's natural units:
lengths in laser wavelengths ``lambda``, times in inverse linewidths
``1/Gamma``, hence velocities in ``lambda*Gamma`` and accelerations in
``lambda*Gamma**2``.  This module owns the conversions in and out of SI.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

# CODATA 2018 exact / recommended values
SPEED_OF_LIGHT = 299792458.0  # m / s
HBAR = 1.054571817e-34  # J s
BOLTZMANN = 1.380649e-23  # J / K
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F / m
STANDARD_GRAVITY = 9.80665  # m / s^2

# Defaults: the Rb-85 D1 line driven far to the red.
DEFAULT_TRANSITION_WAVELENGTH = 795e-9  # m
DEFAULT_LASER_WAVELENGTH = 862e-9  # m
DEFAULT_LINEWIDTH = 3.7e7  # 1 / s
DEFAULT_ATOM_MASS = 1.40999e-25  # kg


@dataclass(frozen=True)
class PhysicalSetup:
    """Atom + laser parameters from which every derived scale follows.

    Parameters
    ----------
    transition_wavelength : float
        Two-level transition wavelength in meters.
    laser_wavelength : float
        Driving laser wavelength in meters.  Larger than the transition
        wavelength means red detuning.
    gamma : float
        Spontaneous decay rate (Einstein A coefficient) in 1/s.
    atom_mass : float
        Atomic mass in kg.
    gravity : float
        Gravitational acceleration magnitude in m/s^2; the field points
        along -x in the trajectory frame.
    """

    transition_wavelength: float = DEFAULT_TRANSITION_WAVELENGTH
    laser_wavelength: float = DEFAULT_LASER_WAVELENGTH
    gamma: float = DEFAULT_LINEWIDTH
    atom_mass: float = DEFAULT_ATOM_MASS
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self) -> None:
        for name in ("transition_wavelength", "laser_wavelength", "gamma", "atom_mass"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.gravity < 0.0:
            raise ValueError("gravity must be non-negative")
        if self.laser_wavelength <= self.transition_wavelength:
            warnings.warn(
                "laser is not red-detuned (laser_wavelength <= transition_wavelength);"
                " the dipole force will repel atoms from bright regions",
                stacklevel=2,
            )

    # -- derived scales -------------------------------------------------

    @property
    def wavenumber(self) -> float:
        """Laser wavenumber k = 2*pi/lambda in 1/m."""
        return 2.0 * math.pi / self.laser_wavelength

    @property
    def angular_frequency(self) -> float:
        """Laser angular frequency omega = c*k in rad/s."""
        return SPEED_OF_LIGHT * self.wavenumber

    @property
    def length_unit(self) -> float:
        """Natural length unit in meters (one laser wavelength)."""
        return self.laser_wavelength

    @property
    def time_unit(self) -> float:
        """Natural time unit in seconds (one inverse linewidth)."""
        return 1.0 / self.gamma

    @property
    def velocity_unit(self) -> float:
        """Natural velocity unit lambda*Gamma in m/s."""
        return self.laser_wavelength * self.gamma

    @property
    def acceleration_unit(self) -> float:
        """Natural acceleration unit lambda*Gamma^2 in m/s^2."""
        return self.laser_wavelength * self.gamma**2

    @property
    def recoil_parameter(self) -> float:
        """hbar / (m lambda^2 Gamma): converts the force bracket to natural units.

        This dimensionless number multiplies the semiclassical force
        expression (evaluated with rates in Gamma and lengths in lambda)
        to give accelerations in lambda*Gamma^2.
        """
        return HBAR / (self.atom_mass * self.laser_wavelength**2 * self.gamma)

    @property
    def gravity_natural(self) -> float:
        """Gravitational acceleration in lambda*Gamma^2 (about 8.3e-9 here)."""
        return self.gravity / self.acceleration_unit


# -- conversions ---------------------------------------------------------

# natural energy unit is m (λΓ)²; mostly relevant through kinetic temperature


def _unit_for(setup: PhysicalSetup, kind: str) -> float:
    if kind == "length":
        return setup.length_unit
    if kind == "time":
        return setup.time_unit
    if kind == "velocity":
        return setup.velocity_unit
    if kind == "acceleration":
        return setup.acceleration_unit
    if kind == "energy":
        return setup.atom_mass * setup.velocity_unit**2
    raise ValueError(f"unknown quantity kind: {kind!r}")


def to_natural(setup: PhysicalSetup, value: float, kind: str) -> float:
    """Convert an SI value to natural units (kind: length|time|velocity|acceleration|energy)."""
    return value / _unit_for(setup, kind)


def from_natural(setup: PhysicalSetup, value: float, kind: str) -> float:
    """Convert a natural-unit value back to SI; inverse of to_natural."""
    return value * _unit_for(setup, kind)


def length_to_si(setup: PhysicalSetup, value: float) -> float:
    return value * setup.length_unit


def length_from_si(setup: PhysicalSetup, value: float) -> float:
    return value / setup.length_unit


def time_to_si(setup: PhysicalSetup, value: float) -> float:
    return value * setup.time_unit


def time_from_si(setup: PhysicalSetup, value: float) -> float:
    return value / setup.time_unit


def velocity_to_si(setup: PhysicalSetup, value: float) -> float:
    return value * setup.velocity_unit


def velocity_from_si(setup: PhysicalSetup, value: float) -> float:
    return value / setup.velocity_unit


def acceleration_to_si(setup: PhysicalSetup, value: float) -> float:
    return value * setup.acceleration_unit


def acceleration_from_si(setup: PhysicalSetup, value: float) -> float:
    return value / setup.acceleration_unit


def detuning(setup: PhysicalSetup) -> float:
    """Laser-atom detuning delta_omega = omega_laser - omega_transition in rad/s.

    Negative when the laser is red of the transition (laser wavelength
    longer than the transition wavelength).
    """
    return (
        2.0
        * math.pi
        * SPEED_OF_LIGHT
        * (1.0 / setup.laser_wavelength - 1.0 / setup.transition_wavelength)
    )


def detuning_natural(setup: PhysicalSetup) -> float:
    """Detuning in units of the linewidth Gamma."""
    return detuning(setup) / setup.gamma


def dipole_moment(setup: PhysicalSetup) -> float:
    """Transition dipole magnitude (SI, C*m) implied by the decay rate.

    Inverts the spontaneous-emission relation
    ``Gamma = k^3 |mu|^2 / (3 pi epsilon_0 hbar)`` at the setup wavenumber,
    so that ``gamma_from_dipole(setup, dipole_moment(setup))`` returns the
    configured linewidth exactly.
    """
    k = setup.wavenumber
    return math.sqrt(3.0 * math.pi * VACUUM_PERMITTIVITY * HBAR * setup.gamma / k**3)


def gamma_from_dipole(setup: PhysicalSetup, mu: float) -> float:
    """Decay rate implied by a dipole magnitude; inverse of dipole_moment."""
    k = setup.wavenumber
    return k**3 * mu**2 / (3.0 * math.pi * VACUUM_PERMITTIVITY * HBAR)


def kinetic_temperature(setup: PhysicalSetup, speed_natural: float) -> float:
    """Kinetic temperature m v^2 / (2 k_B) in kelvin for a natural-unit speed."""
    v = velocity_to_si(setup, speed_natural)
    return setup.atom_mass * v * v / (2.0 * BOLTZMANN)


def speed_for_temperature(setup: PhysicalSetup, temperature: float) -> float:
    """Natural-unit speed whose kinetic temperature equals ``temperature`` (K)."""
    v = math.sqrt(2.0 * BOLTZMANN * temperature / setup.atom_mass)
    return velocity_from_si(setup, v)


def units_help(setup: PhysicalSetup | None = None) -> str:
    """Human-readable summary of the unit system for a given setup."""
    s = setup if setup is not None else PhysicalSetup()
    lines = [
        "Natural units:",
        f"  length        1 lambda       = {s.length_unit:.6e} m",
        f"  time          1 / Gamma      = {s.time_unit:.6e} s",
        f"  velocity      lambda Gamma   = {s.velocity_unit:.6e} m/s",
        f"  acceleration  lambda Gamma^2 = {s.acceleration_unit:.6e} m/s^2",
        f"  gravity                      = {s.gravity_natural:.6e} lambda Gamma^2",
        f"  detuning                     = {detuning_natural(s):.6e} Gamma",
        f"  recoil parameter hbar/(m lambda^2 Gamma) = {s.recoil_parameter:.6e}",
    ]
    return "\n".join(lines)

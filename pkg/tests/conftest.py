import pytest

from weberatom.beams import BeamSpec, calibrate_amplitude
from weberatom.units import PhysicalSetup


@pytest.fixture(scope="session")
def setup():
    return PhysicalSetup()


@pytest.fixture(scope="session")
def spec():
    """Default beam calibrated to its target irradiance."""
    base = BeamSpec()
    return base.with_scale(calibrate_amplitude(base))

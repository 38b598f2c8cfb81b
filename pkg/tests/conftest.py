import pytest

from sqw.logger import detach_file_logging, set_verbosity
from sqw.physics import Grid2D, ParticleBeam



@pytest.fixture
def grid128() -> Grid2D:
    return Grid2D(nx=128, ny=128, extent_x=8.0, extent_y=8.0)


@pytest.fixture
def grid64() -> Grid2D:
    return Grid2D(nx=64, ny=64, extent_x=6.0, extent_y=6.0)


@pytest.fixture
def neutron() -> ParticleBeam:
    return ParticleBeam.from_wavelength(1.67492749804e-27, 2e-10, 1e-5)


@pytest.fixture(autouse=True)
def _quiet_logger():
    yield
    detach_file_logging()
    set_verbosity(False)

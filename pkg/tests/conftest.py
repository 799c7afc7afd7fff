import pytest

from bispin import CPWGeometry, ImplantRegion, SpinSystem, sample_donors
from bispin.config import default_config


@pytest.fixture(scope="session")
def bi():
    return SpinSystem()


@pytest.fixture(scope="session")
def run_config():
    return default_config()


@pytest.fixture(scope="session")
def default_ensemble():
    return sample_donors(CPWGeometry(), ImplantRegion(), 32, 8)


@pytest.fixture(scope="session")
def small_ensemble():
    return sample_donors(CPWGeometry(), ImplantRegion(), 16, 4)

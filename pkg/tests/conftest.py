import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from qd_laser.fock_algebra import HilbertLayout  # noqa: E402
from qd_laser.generators import ModelConfig  # noqa: E402
from qd_laser.phonon import BathParams, PhononKernel, null_kernel  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="Run the full-size scenario sweeps.")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size scenario sweep, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def layout():
    return HilbertLayout(4)


@pytest.fixture(scope="session")
def cold_kernel():
    return PhononKernel.from_bath(BathParams(temperature=0.0))


@pytest.fixture(scope="session")
def warm_kernel():
    return PhononKernel.from_bath(BathParams(temperature=5.0))


@pytest.fixture(scope="session")
def bare_kernel():
    return null_kernel()


@pytest.fixture
def incoherent_config():
    return ModelConfig(n_max=4, eta1=0.5, eta2=0.5, bath=BathParams(temperature=5.0))


@pytest.fixture
def coherent_config():
    return ModelConfig(pump_mode="coherent", n_max=4, eta1=0.8, eta2=0.8, delta1p=-1.5, delta2p=-1.5,
                       delta_cp=0.7, bath=BathParams(temperature=5.0))

"""
Shared fixtures: benchmark buildings, published designs, seeded RNGs.
"""
import numpy as np
import pytest

from tmdreef.core.experiment import build_problem, load_config
from tmdreef.core.presets import design_from_document, load_design
from tmdreef.core.schemas import FrfConfig
from tmdreef.core.structure import BuildingModel


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow stochastic tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def n2_building():
    return BuildingModel.from_lists([2.0, 1.0], [1000.0, 500.0], 0.01)


@pytest.fixture(scope="session")
def n2_cfg():
    return load_config(preset="n2-paper")


@pytest.fixture(scope="session")
def n4_cfg():
    return load_config(preset="n4-paper")


@pytest.fixture(scope="session")
def n2_problem(n2_cfg):
    return build_problem(n2_cfg)


@pytest.fixture(scope="session")
def n4_problem(n4_cfg):
    return build_problem(n4_cfg)


@pytest.fixture(scope="session")
def lab_problem():
    return build_problem(load_config(preset="n2-lab"))


@pytest.fixture(scope="session")
def n2_best():
    return design_from_document(load_design("n2-paper-best"))


@pytest.fixture
def frf_cfg():
    return FrfConfig()

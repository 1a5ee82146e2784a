import logging

import numpy as np
import pytest

from cdrpinn.network import init_xavier
from cdrpinn.problems import make_problem


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run desk-scale reproduction tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def p1d():
    return make_problem("P1D", 1e-3)


@pytest.fixture
def small_model():
    return init_xavier(1, 3, 10, "normal", seed=7)


@pytest.fixture
def cdrpinn_log(caplog):
    """caplog for the cdrpinn logger tree, which does not propagate to root"""
    root = logging.getLogger("cdrpinn")
    root.addHandler(caplog.handler)
    caplog.set_level(logging.DEBUG, logger="cdrpinn")
    yield caplog
    root.removeHandler(caplog.handler)
    root.setLevel(logging.INFO)

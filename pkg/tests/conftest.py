"""Shared fixtures; the heavier objects are session-scoped and cached."""

import numpy as np
import pytest

from hopfscope.integrate import IntegratorConfig, integrate
from hopfscope.isi import measure_spike_train
from hopfscope.model import find_hopf_nu, normal_form
from hopfscope.taylor import taylor_of_model


@pytest.fixture(scope="session")
def hopf():
    return find_hopf_nu()


@pytest.fixture(scope="session")
def taylor_p3(hopf):
    return taylor_of_model(0.0, 3.0)


@pytest.fixture(scope="session")
def taylor_p22(hopf):
    return taylor_of_model(0.0, 2.2)


@pytest.fixture(scope="session")
def reference_spike_train():
    """Multimodal run used by several threshold/robustness tests."""
    return measure_spike_train(0.04, 3.0, 700.0, cfg=IntegratorConfig(rtol=1e-9, atol=1e-11))


@pytest.fixture(scope="session")
def subcritical_traj():
    """Short multimodal trajectory at alpha = 0.0445, p = 3."""
    nf = normal_form(0.0445, 3.0)
    return integrate(
        nf, [0.0, 0.01, 0.0], (0.0, 300.0), cfg=IntegratorConfig(rtol=1e-9, atol=1e-11)
    )


def pytest_addoption(parser):
    parser.addoption(
        "--skip-slow",
        action="store_true",
        default=False,
        help="skip the long-running acceptance criteria",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--skip-slow"):
        marker = pytest.mark.skip(reason="--skip-slow given")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(marker)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance experiment")

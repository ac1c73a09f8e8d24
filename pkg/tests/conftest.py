from pathlib import Path

import numpy as np
import pytest

from fem.assembly import discretize

ROOT = Path(__file__).resolve().parent.parent


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow acceptance sweeps"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def disc4():
    return discretize(4)


@pytest.fixture(scope="session")
def disc8():
    return discretize(8)


@pytest.fixture
def settings_path():
    return ROOT / "settings.toml"

import numpy as np
import pytest

from gqft.harness import HarnessConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def config():
    return HarnessConfig()

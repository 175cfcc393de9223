import numpy as np
import pytest

from berrylab.corpus import constant_z_family, equatorial_loop, tilted_loop_family


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


@pytest.fixture(scope="session")
def equatorial():
    return equatorial_loop()


@pytest.fixture(scope="session")
def tilted_third():
    return tilted_loop_family(np.pi / 3.0)


@pytest.fixture(scope="session")
def constant_z():
    return constant_z_family(1, 1.0)

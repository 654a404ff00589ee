import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from gibbs_shadows import clifford as cl


@pytest.fixture(scope="session")
def cl1_group():
    return cl.enumerate_group(1)


@pytest.fixture(scope="session")
def cl2_group():
    return cl.enumerate_group(2)


@pytest.fixture(scope="session")
def cl1_unitaries(cl1_group):
    return [cl.dense_unitary(t) for t in cl1_group]


@pytest.fixture(scope="session")
def cl2_unitaries(cl2_group):
    return [cl.dense_unitary(t) for t in cl2_group]


@pytest.fixture()
def rng():
    return np.random.default_rng(20240810)

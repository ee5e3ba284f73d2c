import numpy as np
import pytest

from qham.lie import GroupSpec


@pytest.fixture
def su2():
    return GroupSpec.parse("SU(2)")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

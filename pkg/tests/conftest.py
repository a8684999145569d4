import numpy as np
import pytest

from stableheat import StableParams


@pytest.fixture
def p11():
    return StableParams(1, 1.0)


@pytest.fixture
def p21():
    return StableParams(2, 1.0)


@pytest.fixture
def p15():
    return StableParams(1, 1.5)


def philox(seed, index=0):
    key = np.array([np.uint64(seed), np.uint64(index)])
    return np.random.Generator(np.random.Philox(key=key))

import numpy as np
import pytest

from stcode import galois


@pytest.fixture
def gf8():
    return galois.field(8)


@pytest.fixture
def gf16():
    return galois.field(16)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)

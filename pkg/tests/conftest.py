import numpy as np
import pytest

from h1loc.residues import PrimePowerModulus


@pytest.fixture
def m3():
    return PrimePowerModulus(3, 1)


@pytest.fixture
def m9():
    return PrimePowerModulus(3, 2)


@pytest.fixture
def m5():
    return PrimePowerModulus(5, 1)


@pytest.fixture
def m25():
    return PrimePowerModulus(5, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)

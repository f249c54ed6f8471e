import numpy as np
import pytest

from heatkernel.group import RadialFunction


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_polynomial(rng):
    """Factory for radial polynomials sum c_ij r^i z^j with normal coefficients."""
    def make(degree: int = 4) -> RadialFunction:
        return RadialFunction.polynomial(rng.normal(size=(degree, degree)))
    return make


@pytest.fixture
def monomial():
    """Factory for r^i z^j."""
    def make(i: int, j: int) -> RadialFunction:
        c = np.zeros((4, 4))
        c[i, j] = 1.0
        return RadialFunction.polynomial(c)
    return make

import math

import numpy as np
import pytest

from heatkernel.errors import DomainError
from heatkernel.special import (
    _arch_ratio_slope, _signed_arccosh_sq, arch_ratio, log_sinh_ratio_derivatives, sinh_ratio,
)


def test_arch_ratio_values():
    assert arch_ratio(1.0) == 1.0
    assert arch_ratio(math.cosh(1.0)) == pytest.approx(1.0 / math.sinh(1.0))
    assert arch_ratio(0.0) == pytest.approx(math.pi / 2.0)


@pytest.mark.parametrize("e", [2e-4, -2e-4, 5e-5])
def test_arch_ratio_series_matches_closed_form(e):
    x = 1.0 + e
    exact = math.acosh(x) / math.sqrt(x * x - 1.0) if e > 0 else math.acos(x) / math.sqrt(1.0 - x * x)
    assert arch_ratio(x) == pytest.approx(exact, rel=1e-10)


def test_arch_ratio_domain():
    with pytest.raises(DomainError):
        arch_ratio(-1.0)
    with pytest.raises(DomainError):
        arch_ratio(np.array([0.0, -2.0]))


def test_arch_ratio_slope_matches_difference():
    for x in (0.3, 0.99995, 1.7, 4.0):
        h = 1e-6
        numeric = (arch_ratio(x + h) - arch_ratio(x - h)) / (2.0 * h)
        assert float(_arch_ratio_slope(x)) == pytest.approx(numeric, rel=1e-5)


def test_signed_arccosh_square():
    assert float(_signed_arccosh_sq(math.cosh(2.0))) == pytest.approx(4.0)
    assert float(_signed_arccosh_sq(0.0)) == pytest.approx(-(math.pi / 2.0) ** 2)


def test_sinh_ratio():
    assert sinh_ratio(0.0) == 1.0
    assert complex(sinh_ratio(1.0)).real == pytest.approx(1.0 / math.sinh(1.0))


@pytest.mark.parametrize("a", [0.05, 0.5, 2.0, 0.3 + 0.4j])
def test_log_sinh_ratio_derivatives(a):
    h = 1e-5
    g = lambda x: np.log(x / np.sinh(x))
    first, second = log_sinh_ratio_derivatives(np.array([a]))
    assert complex(first[0]) == pytest.approx((g(a + h) - g(a - h)) / (2.0 * h), rel=1e-6, abs=1e-9)
    assert complex(second[0]) == pytest.approx((g(a + h) - 2.0 * g(a) + g(a - h)) / h**2, rel=1e-4, abs=1e-6)

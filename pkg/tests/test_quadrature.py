import math

import numpy as np
import pytest

from heatkernel.errors import DomainError
from heatkernel.quadrature import (
    QuadSpec, composite_rule, gauss_legendre, graded_breaks, integrate_panels, mu_rule, rectangle_rule,
)


def test_gauss_legendre_weights():
    x, w = gauss_legendre(8)
    assert w.sum() == pytest.approx(2.0)
    assert np.all(np.abs(x) < 1.0)


def test_composite_rule_is_exact_for_polynomials():
    x, w = composite_rule([0.0, 0.5, 2.0], 4)
    assert np.sum(w * x**7) == pytest.approx(2.0**8 / 8.0)


def test_graded_breaks():
    b = graded_breaks(16)
    assert b[0] == 0.0 and b[-1] == 1.0
    assert np.all(np.diff(b) > 0.0)


def test_integrate_panels():
    value, err = integrate_panels(math.cos, np.linspace(0.0, math.pi / 2.0, 5), QuadSpec())
    assert value == pytest.approx(1.0, abs=1e-12)
    assert err < 1e-10


@pytest.mark.parametrize("kwargs", [{"abs_tol": 0.0}, {"rel_tol": -1.0}, {"max_levels": 0}, {"max_halfwidth": 0.0}])
def test_quadspec_validation(kwargs):
    with pytest.raises(DomainError):
        QuadSpec(**kwargs)


def test_mu_rule_integrates_haar_measure_of_box():
    r_max, z_max = 1.5, 2.0
    r, z, w = mu_rule(0.3, r_max, z_max)
    exact = 2.0 * math.pi * 2.0 * z_max * (math.cosh(2.0 * r_max) - 1.0) / 4.0
    assert w.sum() == pytest.approx(exact, rel=1e-12)
    assert r.max() < r_max and z.min() > 0.0


def test_rectangle_rule():
    x, y, w = rectangle_rule(0.0, 2.0, -1.0, 1.0, 0.3)
    assert w.sum() == pytest.approx(4.0)
    assert np.sum(w * x * y**2) == pytest.approx(4.0 / 3.0)

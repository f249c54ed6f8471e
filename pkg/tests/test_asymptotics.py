import math

import pytest

from heatkernel.asymptotics import (
    _continued_ratio, asym_axis_z, asym_generic, asym_r, laplace_ratios, leandre_extract,
    saddle_curvature, upper_estimate_check,
)
from heatkernel.distance import distance_squared
from heatkernel.errors import DomainError, SingularAtAxis
from heatkernel.kernel import p_axis, p_integral


def test_axis_leading_term():
    t, z = 0.05, 1.0
    expected = math.exp(-t) / (16.0 * t * t) * math.exp(-(2.0 * math.pi * z + z * z) / (4.0 * t))
    assert asym_axis_z(t, z) == pytest.approx(expected)
    # the closed form differs by (1 + e^(-pi z / 2t))^-2 only
    assert p_axis(t, z) / asym_axis_z(t, z) == pytest.approx(1.0, rel=1e-10)


def test_axis_leading_term_domain():
    with pytest.raises(DomainError):
        asym_axis_z(0.1, 0.0)


def test_asym_r_is_singular_at_the_axis():
    with pytest.raises(SingularAtAxis):
        asym_r(0.1, 0.0)


def test_generic_term_reduces_to_radial_term_at_z_zero():
    assert asym_generic(0.02, 1.0, 0.0).evaluate(0.02) == pytest.approx(asym_r(0.02, 1.0), rel=1e-12)


def test_generic_term_continuous_in_z():
    a0 = asym_generic(0.1, 0.8, 0.0)
    a1 = asym_generic(0.1, 0.8, 1e-5)
    assert a1.prefactor == pytest.approx(a0.prefactor, rel=1e-3)
    assert a1.exponent_coeff == pytest.approx(a0.exponent_coeff, rel=1e-3)


def test_generic_exponent_is_quarter_distance():
    a = asym_generic(0.1, 1.2, 0.7)
    assert 4.0 * a.exponent_coeff == pytest.approx(distance_squared(1.2, 0.7).d2, rel=1e-10)


def test_continued_ratio_near_one():
    exact = _continued_ratio(1.001)
    assert _continued_ratio(1.0) == 3.0
    assert _continued_ratio(1.00005) == pytest.approx(exact, rel=1e-3)
    assert _continued_ratio(0.5) > 0.0


def test_saddle_curvature_on_the_horizontal_axis():
    r = 1.3
    expected = 2.0 * (r / math.tanh(r) - 1.0)
    assert saddle_curvature(r, math.cosh(r)) == pytest.approx(expected, rel=1e-10)


def test_laplace_ratio_on_the_horizontal_axis():
    ratio = p_integral(0.01, 1.0, 0.0).value / asym_r(0.01, 1.0)
    assert 0.95 <= ratio <= 1.05


def test_laplace_ratio_at_a_generic_point():
    ratio = p_integral(0.01, 1.0, 0.3).value / asym_generic(0.01, 1.0, 0.3).evaluate(0.01)
    assert 0.9 <= ratio <= 1.1


def test_laplace_ratios_approach_one():
    table = laplace_ratios(1.0, 0.3, [0.04, 0.02, 0.01])
    errors = (table["ratio"] - 1.0).abs().to_numpy()
    assert errors[-1] < errors[0]


@pytest.mark.slow
@pytest.mark.parametrize("r, z, d2", [
    (1.0, 0.0, 1.0),
    (1e-7, 1.0, 2.0 * math.pi + 1.0),
    (0.8, 0.5, None),
])
def test_leandre_recovers_distance(r, z, d2):
    target = d2 if d2 is not None else distance_squared(r, z).d2
    assert leandre_extract(r, z).value == pytest.approx(target, rel=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("r, z", [(0.5, 0.8), (1.2, -0.6)])
def test_leandre_is_consistent_with_the_distance_equation(r, z):
    ex = leandre_extract(r, z)
    assert ex.value == pytest.approx(distance_squared(r, z).d2, rel=5e-3)


def test_leandre_grid_validation():
    with pytest.raises(DomainError):
        leandre_extract(1.0, 0.0, t_grid=(0.01, 0.02, 0.04))
    with pytest.raises(DomainError):
        leandre_extract(1.0, 0.0, t_grid=(0.02, 0.01))


def test_upper_estimate_constant_is_finite():
    table = upper_estimate_check(0.5, [0.25, 0.1], [0.0, 0.5, 1.0], [0.0, 0.5, 1.5])
    assert list(table["t"]) == [0.25, 0.1]
    assert (table["C"] > 0.0).all() and table["C"].lt(math.inf).all()

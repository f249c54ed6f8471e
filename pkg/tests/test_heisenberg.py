import math

import numpy as np
import pandas as pd
import pytest

from heatkernel.heisenberg import (
    DilationConstant, HeisenbergPoint, apply_dilated_fields, dilated_field_convergence,
    dilated_sublaplacian_coeffs, dilation_limit_check, gaveau_grid, gaveau_kernel, heisenberg_mass,
    heisenberg_sublaplacian_coeffs, measure_dilation_constant,
)
from heatkernel.errors import DomainError, SingularAtAxis
from heatkernel.kernel import PROBABILITY, STANDARD


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_gaveau_at_origin(t):
    # int_0^inf lambda / sinh(lambda t) = pi^2 / (4 t^2)
    assert gaveau_kernel(t, 0.0, 0.0).value == pytest.approx(1.0 / (32.0 * t * t), rel=1e-8)


def test_gaveau_on_the_vertical_axis():
    # int_0^inf cos(a lambda) lambda / sinh(lambda) = (pi^2 / 4) sech^2(pi a / 2)
    assert gaveau_kernel(1.0, 0.0, 1.0).value == pytest.approx(1.0 / (32.0 * math.cosh(math.pi / 4.0) ** 2), rel=1e-8)


def test_grid_matches_adaptive():
    r = np.array([0.0, 0.5, 1.5, 1.0])
    z = np.array([0.0, 0.3, -2.0, 4.0])
    expected = [gaveau_kernel(1.0, a, b).value for a, b in zip(r, z)]
    np.testing.assert_allclose(gaveau_grid(1.0, r, z), expected, rtol=1e-7, atol=1e-14)


@pytest.mark.slow
def test_heisenberg_mass_is_one():
    assert heisenberg_mass() == pytest.approx(1.0, abs=1e-4)


def test_point_reduces_theta():
    p = HeisenbergPoint(1.0, -math.pi / 2.0, 0.0)
    assert p.theta == pytest.approx(1.5 * math.pi)
    x, y, _ = p.xyz
    assert (x, y) == pytest.approx((0.0, -1.0), abs=1e-12)
    with pytest.raises(DomainError):
        HeisenbergPoint(-1.0, 0.0, 0.0)


def test_undilated_coefficients_match_the_sublaplacian():
    r = 0.7
    c = dilated_sublaplacian_coeffs(1.0, r)
    assert c.r == pytest.approx(2.0 / math.tanh(2.0 * r))
    assert c.zz == pytest.approx(math.tanh(r) ** 2)


def test_dilated_coefficients_converge():
    r = 0.7
    limit = np.array(heisenberg_sublaplacian_coeffs(r).as_tuple())
    far = np.array(dilated_sublaplacian_coeffs(1e6, r).as_tuple())
    np.testing.assert_allclose(far, limit, rtol=1e-5)


def test_coefficients_singular_at_the_axis():
    with pytest.raises(SingularAtAxis):
        heisenberg_sublaplacian_coeffs(0.0)
    with pytest.raises(DomainError):
        dilated_sublaplacian_coeffs(0.5, 1.0)


def test_dilated_fields_converge_at_rate_one_over_c():
    f = lambda r, theta, z: r * r * math.cos(theta) + r * z
    points = [HeisenbergPoint(0.6, 0.3, 0.4), HeisenbergPoint(1.1, 2.0, -0.7)]
    table = dilated_field_convergence(f, [10.0, 100.0, 1000.0], points)
    assert table["max_diff"].is_monotonic_decreasing
    scaled = table["scaled"].to_numpy()
    assert scaled.max() / scaled.min() < 2.0


def test_dilated_fields_at_infinity():
    f = lambda r, theta, z: z
    assert apply_dilated_fields(f, math.inf, HeisenbergPoint(1.0, 0.0, 0.0))[2] == pytest.approx(1.0)


def test_dilation_constant_is_measured_and_identified():
    found = measure_dilation_constant([0.02, 0.01], convention=STANDARD)
    assert list(found.table.columns) == ["r", "z", "t", "scaled_value", "h1_value", "ratio"]
    assert len(found.ratios) == 3
    assert found.spread <= 0.03
    assert found.identified == 0.5
    assert found.kappa == pytest.approx(0.5, rel=0.03)


def test_probability_dilation_constant_identifies_with_one():
    found = measure_dilation_constant([0.01], convention=PROBABILITY)
    np.testing.assert_allclose(found.ratios, [0.99, 0.9876, 0.9874], atol=5e-3)
    assert found.identified == 1.0
    assert np.isnan(found.drift)


def test_dilation_constant_spread_is_the_largest_pairwise_gap():
    table = pd.DataFrame({"r": [0.0, 0.0, 1.0], "z": [0.0, 1.0, 0.5], "t": [0.01] * 3,
                          "scaled_value": [0.0] * 3, "h1_value": [1.0] * 3, "ratio": [0.99, 0.96, 0.98]})
    found = DilationConstant(table)
    assert found.spread == pytest.approx(0.03 / 0.99)
    assert found.kappa == pytest.approx(0.9766666666666667)
    assert found.identified == 1.0


def test_dilation_limit_at_origin_is_exact():
    # t^2 p_t(0, 0) / h_1(0, 0) = (e^-t / 64) / (1 / 32)
    table = dilation_limit_check([0.04, 0.01], 0.0, 0.0)
    np.testing.assert_allclose(table["ratio"], 0.5 * np.exp(-table["t"]), rtol=1e-8)


def test_dilation_limit_off_axis():
    table = dilation_limit_check([0.02, 0.01], 1.0, 0.5)
    assert table["ratio"].iloc[-1] == pytest.approx(0.5, rel=0.03)
    assert table["ratio"].iloc[-1] == pytest.approx(table["ratio"].iloc[0], rel=0.03)


def test_dilation_limit_rejects_large_heights():
    with pytest.raises(DomainError):
        dilation_limit_check([2.0], 0.0, 2.0)

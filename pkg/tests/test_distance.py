import math

import numpy as np
import pytest

from heatkernel.distance import (
    critical_map_slope, distance_between, distance_bounds_check, distance_squared,
    distance_squared_array, solve_theta, theta_bound, triangle_bounds,
)
from heatkernel.errors import DomainError
from heatkernel.group import CylCoord, GroupElement, cyl_to_matrix


def test_distance_on_the_horizontal_axis():
    dv = distance_squared(1.5, 0.0)
    assert dv.d2 == pytest.approx(2.25)
    assert dv.case_tag == "axis_r"


def test_distance_on_the_vertical_axis():
    dv = distance_squared(0.0, 1.0)
    assert dv.d2 == pytest.approx(2.0 * math.pi + 1.0)
    assert dv.case_tag == "axis_z"


@pytest.mark.parametrize("r, z", [(0.8, 0.5), (2.0, 3.0), (0.3, -1.2), (1.0, 1e-6)])
def test_theta_solves_the_critical_equation(r, z):
    sol = solve_theta(r, z)
    assert sol.residual <= 1e-12
    assert abs(sol.theta) < theta_bound(r)
    assert math.copysign(1.0, sol.theta) == -math.copysign(1.0, z)


def test_distance_is_even_in_z():
    assert distance_squared(0.7, 1.1).d2 == pytest.approx(distance_squared(0.7, -1.1).d2, rel=1e-12)


def test_distance_continuous_at_the_horizontal_axis():
    assert distance_squared(1.0, 1e-6).d2 == pytest.approx(1.0, rel=1e-4)


def test_critical_map_slope_at_least_one():
    theta = np.linspace(-1.5, 1.5, 31)
    assert np.all(critical_map_slope(theta, 0.9) >= 1.0 - 1e-12)


def test_triangle_bounds_hold(rng):
    for _ in range(20):
        r, z = rng.uniform(0.05, 3.0), rng.uniform(-math.pi, math.pi)
        lo, hi = triangle_bounds(r, z)
        d = distance_squared(r, z).d
        assert lo - 1e-9 <= d <= hi + 1e-9


def test_array_matches_scalar():
    r = np.array([0.0, 0.5, 1.0, 2.5])
    z = np.array([1.0, 0.0, -0.4, 2.0])
    expected = [distance_squared(a, b).d2 for a, b in zip(r, z)]
    np.testing.assert_allclose(distance_squared_array(r, z), expected, rtol=1e-12)


def test_distance_between_is_left_invariant():
    g = cyl_to_matrix(CylCoord(0.9, 0.4, 0.7))
    assert distance_between(GroupElement.identity(), g).d2 == pytest.approx(distance_squared(0.9, 0.7).d2)
    h = cyl_to_matrix(CylCoord(0.3, 2.0, -0.2))
    assert distance_between(h, h @ g).d2 == pytest.approx(distance_squared(0.9, 0.7).d2, rel=1e-8)


def test_distance_bounds_constants():
    grid = [(r, z) for r in np.linspace(0.0, 3.0, 7) for z in np.linspace(-math.pi, math.pi, 9)]
    c, C = distance_bounds_check(grid)
    assert 0.0 < c <= C < math.inf


def test_distance_bounds_on_the_full_grid():
    grid = [(r, z) for r in np.linspace(0.0, 3.0, 50) for z in np.linspace(-math.pi, math.pi, 50)]
    c, C = distance_bounds_check(grid)
    assert 0.0 < c < C < math.inf
    # (0, +-pi) is on the grid, where the ratio is 2 pi + pi
    assert C >= 3.0 * math.pi - 1e-9
    # d <= r + d(0, z) gives d^2 <= 2 r^2 + 6 pi |z|
    assert C <= 6.0 * math.pi
    r, z = np.array(grid).T
    ratios = distance_squared_array(r, z) / (r**2 + np.abs(z))
    assert (c, C) == pytest.approx((ratios.min(), ratios.max()))


def test_domain_errors():
    with pytest.raises(DomainError):
        distance_squared(-0.1, 0.0)
    with pytest.raises(DomainError):
        distance_squared(1.0, 4.0)
    with pytest.raises(DomainError):
        solve_theta(0.0, 1.0)

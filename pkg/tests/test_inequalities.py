import itertools
import math

import numpy as np
import pytest

from heatkernel.errors import DomainError
from heatkernel.group import CylCoord
from heatkernel.inequalities import (
    InequalityReport, LiYauParams, constant_A, constant_A_liyau, constant_B, constant_C,
    gradient_bound_check, gradient_bound_stability, gradient_grid, harnack_samples, harnack_spot_check,
    harnack_stability, liyau_check, relative_spread, reports_frame,
)
from heatkernel.kernel import PROBABILITY, STANDARD


@pytest.mark.parametrize("t", [0.01, 0.5, 3.0])
def test_constant_A_closed_form(t):
    expected = math.exp(-2.0 * t) * (1.0 + t) / (512.0 * t**3)
    assert constant_A(t, STANDARD) == pytest.approx(expected, rel=1e-10)


def test_constant_A_limits():
    assert 512.0 * constant_A(1e-3) * 1e-9 == pytest.approx(1.0, rel=5e-3)
    assert 512.0 * constant_A(50.0) * 2500.0 * math.exp(100.0) == pytest.approx(1.02, rel=1e-9)


@pytest.mark.parametrize("convention", [STANDARD, PROBABILITY])
def test_constant_A_is_decreasing(convention):
    values = np.array([constant_A(float(t), convention) for t in np.geomspace(0.01, 20.0, 40)])
    assert np.all(np.diff(values) < 0.0)


def test_constant_A_probability_doubles_at_small_time():
    assert constant_A(0.2, PROBABILITY) == pytest.approx(2.0 * constant_A(0.2, STANDARD), rel=1e-12)


def test_liyau_constants():
    p = LiYauParams(3.0)
    assert constant_A_liyau(1.0, p) == pytest.approx(4.0 + 1.0 / 6.0)
    assert constant_B(1.0, p) == pytest.approx(16.0 / 3.0 + 16.0 + 16.0)


def test_liyau_params():
    with pytest.raises(DomainError):
        LiYauParams(2.0)
    assert LiYauParams.for_large_time(5.0).alpha == 5.0


@pytest.mark.parametrize("lhs, rhs, budget, status", [
    (1.0, 2.0, 0.1, "pass"),
    (2.0, 1.0, 0.1, "fail"),
    (1.0, 1.05, 0.1, "inconclusive"),
])
def test_report_status(lhs, rhs, budget, status):
    rep = InequalityReport(0.5, (1.0, 0.0), lhs, rhs, budget)
    assert rep.status == status
    assert rep.passed == (status != "fail")
    assert rep.to_record()["status"] == status


def test_liyau_sweep_passes():
    grid = list(itertools.product(np.linspace(0.2, 2.0, 4), np.linspace(-2.0, 2.0, 5)))
    reports = liyau_check(0.5, 0.05, grid, LiYauParams(3.0))
    assert len(reports) == 20
    assert all(rep.passed for rep in reports)
    frame = reports_frame(reports)
    assert {"lhs", "rhs", "slack", "budget", "status"} <= set(frame.columns)


def test_liyau_domain():
    with pytest.raises(DomainError):
        liyau_check(0.5, 0.0, [(1.0, 0.0)], LiYauParams())


def test_gradient_bound():
    bound = gradient_bound_check(0.5, [(0.5, 0.0), (1.0, 1.0), (1.5, -2.0)])
    assert bound.form == "small_time"
    assert 0.0 < bound.c_hat < math.inf
    assert len(bound.table) == 3
    assert gradient_bound_check(3.0, [(1.0, 0.5)]).form == "large_time"


def test_gradient_bound_gap():
    with pytest.raises(DomainError):
        gradient_bound_check(1.5, [(1.0, 0.0)])


def test_relative_spread_is_measured_against_the_largest():
    assert relative_spread([0.4993, 0.5418, 0.6000]) == pytest.approx(0.1678, abs=1e-4)
    assert relative_spread([0.0, 0.0]) == 0.0


def test_gradient_bound_is_stable_across_small_times():
    found = gradient_bound_stability()
    assert len(gradient_grid()) == 25
    assert np.all(np.isfinite(found.c_hats)) and np.all(found.c_hats > 0.0)
    assert found.spread <= 0.2
    assert found.stable


def test_gradient_bound_stability_refuses_mixed_forms():
    with pytest.raises(DomainError):
        gradient_bound_stability((0.5, 3.0), [(1.0, 0.5)])


def test_harnack_fit_covers_every_pair():
    points = [CylCoord(r, 0.0, z) for r, z in [(0.3, 0.0), (1.0, 0.5), (0.6, -1.0)]]
    pairs = list(itertools.product(points, points))
    fit = harnack_spot_check(0.2, 0.5, pairs)
    assert fit.form == "small_time"
    assert fit.a1 >= 0.0 and fit.a2 >= 0.0
    assert (fit.table["slack"] >= -1e-6).all()


def test_harnack_identity_anchor_fixes_a1():
    points = [CylCoord(r, 0.0, z) for r, z in [(0.3, 0.0), (1.0, 0.5), (0.6, -1.0)]]
    fit = harnack_spot_check(0.2, 0.5, list(itertools.product(points, points)))
    # ln p_0.2(e) / p_0.5(e) = 2 ln(2.5) + 0.3
    assert fit.anchor == pytest.approx(2.0 * math.log(2.5) + 0.3, rel=1e-8)
    assert fit.a1 == pytest.approx(fit.anchor / math.log(2.5), rel=1e-6)


def test_harnack_samples_interleave():
    first, second = harnack_samples()
    assert len(first) == len(second) == 25
    assert not {(g.r, g.z) for g in first} & {(g.r, g.z) for g in second}
    assert min(g.r for g in first) == pytest.approx(0.3)
    assert max(g.r for g in second) == pytest.approx(1.5)


def test_harnack_stability_needs_disjoint_samples():
    p = [CylCoord(1.0, 0.0, 0.0)]
    with pytest.raises(DomainError):
        harnack_stability(0.2, 0.5, (p, p))


@pytest.mark.slow
def test_harnack_constants_agree_across_disjoint_samples():
    found = harnack_stability(0.2, 0.5)
    assert found.spread_a1 == pytest.approx(0.0, abs=1e-6)
    assert found.spread <= 0.25
    assert found.stable
    for fit in found.fits:
        assert (fit.table["slack"] >= -1e-6).all()


def test_harnack_domain():
    p = CylCoord(1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        harnack_spot_check(0.5, 0.2, [(p, p)])
    with pytest.raises(DomainError):
        harnack_spot_check(0.5, 1.5, [(p, p)])


@pytest.mark.slow
def test_reverse_poincare_constant():
    assert 0.05 * constant_C(0.05) == pytest.approx(1.0, rel=0.15)
    c = [constant_C(t) for t in (0.25, 0.5, 1.0)]
    assert c[0] > c[1] > c[2]


@pytest.mark.slow
@pytest.mark.parametrize("t", [3.0, 5.0])
def test_reverse_poincare_below_liyau_bound_at_large_time(t):
    assert constant_C(t) <= constant_B(t, LiYauParams.for_large_time(t))


@pytest.mark.slow
def test_reverse_poincare_approaches_one_over_t():
    gaps = [abs(t * constant_C(t) - 1.0) for t in (0.2, 0.1, 0.05)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] <= 0.15

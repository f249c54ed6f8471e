"""p_integral next to the axis against the closed form p_axis."""

import itertools

from heatkernel.checks import CheckResult
from heatkernel.constants import AXIS_HEIGHTS, AXIS_TIMES
from heatkernel.kernel import p_axis, p_integral

SUITES = ("fast", "full")
TOLERANCE = 1e-6


def run(suite: str = "fast") -> CheckResult:
    worst, where = 0.0, None
    for t, z in itertools.product(AXIS_TIMES, AXIS_HEIGHTS):
        err = abs(p_integral(t, 1e-7, z).value / p_axis(t, z) - 1.0)
        if err >= worst:
            worst, where = err, (t, z)
    return CheckResult("axis_closed_form", worst <= TOLERANCE,
                       f"max relative error {worst:.2e} at (t, z) = {where}", {"max_rel_error": worst})

"""
int p_t^2 dmu = p_2t(0, 0) for the probability kernel.

Without fiber images p_2t(0, 0) = 2 e^-2t / (64 (2t)^2) = e^-2t / (128 t^2).
"""

import math

from heatkernel.checks import CheckResult
from heatkernel.constants import SEMIGROUP_TIMES
from heatkernel.kernel import PROBABILITY, l2_mass, p_axis

SUITES = ("fast", "full")
TOLERANCE = 1e-4


def run(suite: str = "fast") -> CheckResult:
    times = SEMIGROUP_TIMES if suite == "full" else SEMIGROUP_TIMES[-1:]
    worst, metrics = 0.0, {}
    for t in times:
        lhs = l2_mass(t, PROBABILITY)
        rhs = p_axis(2.0 * t, 0.0, PROBABILITY)
        worst = max(worst, abs(lhs / rhs - 1.0))
        metrics[f"l2_mass_{t:g}"] = lhs
        metrics[f"closed_form_{t:g}"] = math.exp(-2.0 * t) / (128.0 * t * t)
    return CheckResult("semigroup", worst <= TOLERANCE, f"max relative error {worst:.2e}",
                       {"max_rel_error": worst, **metrics})

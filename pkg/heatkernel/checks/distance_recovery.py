"""-4 t ln p_t extrapolated to t = 0 against d^2."""

import math

from heatkernel.asymptotics import leandre_extract
from heatkernel.checks import CheckResult
from heatkernel.distance import distance_squared

SUITES = ("fast", "full")
TOLERANCE = 0.02

POINTS = ((1.0, 0.0), (1e-7, 1.0), (0.8, 0.5), (0.5, 0.8), (1.2, -0.6))


def run(suite: str = "fast") -> CheckResult:
    metrics, worst = {}, 0.0
    for r, z in POINTS:
        target = 2.0 * math.pi * abs(z) + z * z if r < 1e-6 else distance_squared(r, z).d2
        ex = leandre_extract(r, z)
        err = abs(ex.value / target - 1.0)
        worst = max(worst, err)
        metrics[f"d2_{r:g}_{z:g}"] = ex.value
    return CheckResult("distance_recovery", worst <= TOLERANCE, f"max relative error {worst:.2%}",
                       {"max_rel_error": worst, **metrics})

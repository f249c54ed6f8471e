"""p_integral at r = 1e-7, z = 0 against e^-t / (64 t^2)."""

import math

from heatkernel.checks import CheckResult
from heatkernel.constants import ON_DIAGONAL_TIMES
from heatkernel.kernel import p_integral

SUITES = ("fast", "full")
TOLERANCE = 1e-7


def run(suite: str = "fast") -> CheckResult:
    worst = 0.0
    for t in ON_DIAGONAL_TIMES:
        exact = math.exp(-t) / (64.0 * t * t)
        worst = max(worst, abs(p_integral(t, 1e-7, 0.0).value / exact - 1.0))
    return CheckResult("on_diagonal", worst <= TOLERANCE, f"max relative error {worst:.2e}",
                       {"max_rel_error": worst})

"""
A(t) = e^-2t (1 + t) / (512 t^3) and its two limits.

512 A t^3 -> 1 as t -> 0, and 512 A t^2 e^2t = 1 + 1/t exactly, which is 1.02
at t = 50; the large-time value is compared with that asymptotic.
"""

import math

from heatkernel.checks import CheckResult
from heatkernel.inequalities import constant_A
from heatkernel.kernel import STANDARD

SUITES = ("fast", "full")
SMALL_T, LARGE_T = 1e-3, 50.0
SMALL_T_BAND = 0.005
CLOSED_FORM_TOL = 1e-10


def run(suite: str = "fast") -> CheckResult:
    small = 512.0 * constant_A(SMALL_T, STANDARD) * SMALL_T**3
    large = 512.0 * constant_A(LARGE_T, STANDARD) * LARGE_T**2 * math.exp(2.0 * LARGE_T)
    asymptote = 1.0 + 1.0 / LARGE_T
    closed = max(
        abs(constant_A(t, STANDARD) / (math.exp(-2.0 * t) * (1.0 + t) / (512.0 * t**3)) - 1.0)
        for t in (SMALL_T, 0.1, 1.0, LARGE_T)
    )
    ok = (abs(small - 1.0) <= SMALL_T_BAND and abs(large / asymptote - 1.0) <= CLOSED_FORM_TOL
          and closed <= CLOSED_FORM_TOL)
    return CheckResult("constant_a", ok, f"512 A t^3 = {small:.5f}, 512 A t^2 e^2t = {large:.5f} (1 + 1/t = {asymptote:g})",
                       {"small_time_limit": small, "large_time_limit": large, "closed_form_error": closed})

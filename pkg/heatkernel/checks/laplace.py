"""Kernel over its Laplace leading term at t = 0.01."""

from heatkernel.asymptotics import asym_generic, asym_r
from heatkernel.checks import CheckResult
from heatkernel.kernel import p_integral

SUITES = ("fast", "full")
T = 0.01


def run(suite: str = "fast") -> CheckResult:
    ratio_r = p_integral(T, 1.0, 0.0).value / asym_r(T, 1.0)
    ratio_generic = p_integral(T, 1.0, 0.3).value / asym_generic(T, 1.0, 0.3).evaluate(T)
    ok = 0.95 <= ratio_r <= 1.05 and 0.9 <= ratio_generic <= 1.1
    return CheckResult("laplace", ok, f"r-axis ratio {ratio_r:.4f}, generic ratio {ratio_generic:.4f}",
                       {"ratio_r": ratio_r, "ratio_generic": ratio_generic})

"""C_hat of the gradient bound is finite and varies by at most 20% over t in {0.25, 0.5, 0.9}."""

from heatkernel.checks import CheckResult
from heatkernel.constants import GRADIENT_TIMES
from heatkernel.inequalities import gradient_bound_stability

SUITES = ("fast", "full")


def run(suite: str = "fast") -> CheckResult:
    found = gradient_bound_stability(GRADIENT_TIMES)
    return CheckResult("gradient_bound", found.stable,
                       f"C_hat = {', '.join(f'{v:.4f}' for v in found.c_hats)}, spread {found.spread:.1%}",
                       {"spread": found.spread,
                        **{f"c_hat_{t:g}": float(v) for t, v in zip(GRADIENT_TIMES, found.c_hats)}})

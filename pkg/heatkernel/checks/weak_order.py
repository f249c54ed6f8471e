"""Doubling n_steps halves the bin-wise bias of the simulated r marginal."""

from heatkernel.checks import CheckResult
from heatkernel.constants import WEAK_ORDER_RATIO_BAND
from heatkernel.montecarlo import MCConfig, weak_order_bias

SUITES = ("full",)


def run(suite: str = "full") -> CheckResult:
    report = weak_order_bias(MCConfig(seed=0, n_paths=200_000, n_steps=8, t_final=0.5))
    lo, hi = WEAK_ORDER_RATIO_BAND
    ok = report.resolved and lo <= report.ratio <= hi
    return CheckResult("weak_order", ok,
                       f"excess bias {report.coarse.excess_bias:.3g} at 8 steps, {report.fine.excess_bias:.3g} "
                       f"at 16, ratio {report.ratio:.3f}",
                       {"bias_coarse": report.coarse.excess_bias, "bias_fine": report.fine.excess_bias,
                        "ratio": report.ratio, "resolved": report.resolved})

"""Harnack constants fitted on two disjoint samples agree within 25%."""

from heatkernel.checks import CheckResult
from heatkernel.constants import HARNACK_TIMES
from heatkernel.inequalities import harnack_stability

SUITES = ("full",)


def run(suite: str = "full") -> CheckResult:
    found = harnack_stability(*HARNACK_TIMES)
    a, b = found.fits
    return CheckResult("harnack", found.stable,
                       f"A1 = {a.a1:.4f} / {b.a1:.4f}, A2 = {a.a2:.4f} / {b.a2:.4f}, spread {found.spread:.1%}",
                       {"a1_first": a.a1, "a1_second": b.a1, "a2_first": a.a2, "a2_second": b.a2,
                        "spread": found.spread})

"""Li-Yau sweep over r in [0.2, 2], z in [-2, 2]."""

import itertools

import numpy as np

from heatkernel.checks import CheckResult
from heatkernel.constants import LIYAU_ALPHA, LIYAU_EPS, LIYAU_TIMES
from heatkernel.inequalities import LiYauParams, liyau_check

SUITES = ("fast", "full")


def run(suite: str = "fast") -> CheckResult:
    grid = list(itertools.product(np.linspace(0.2, 2.0, 10), np.linspace(-2.0, 2.0, 10)))
    params = LiYauParams(LIYAU_ALPHA)
    reports = [rep for t in LIYAU_TIMES for rep in liyau_check(t, LIYAU_EPS, grid, params)]
    failed = sum(not rep.passed for rep in reports)
    inconclusive = sum(rep.status == "inconclusive" for rep in reports)
    min_slack = min(rep.slack for rep in reports)
    return CheckResult("liyau", failed == 0,
                       f"{len(reports) - failed}/{len(reports)} pass ({inconclusive} inconclusive)",
                       {"failed": failed, "inconclusive": inconclusive, "min_slack": min_slack})

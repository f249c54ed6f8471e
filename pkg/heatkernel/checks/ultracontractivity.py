"""max p_t <= p_t(0, 0) = e^-t / (64 t^2) on a grid."""

import math

import numpy as np

from heatkernel.checks import CheckResult
from heatkernel.kernel import STANDARD, kernel_grid

SUITES = ("fast", "full")
TIMES = (0.25, 1.0)


def run(suite: str = "fast") -> CheckResult:
    r = np.linspace(0.0, 3.0, 31)
    z = np.linspace(-math.pi, math.pi, 41)
    rr, zz = np.meshgrid(r, z, indexing="ij")
    worst = 0.0
    for t in TIMES:
        p, _ = kernel_grid(t, rr, zz, STANDARD)
        worst = max(worst, float(p.max()) / (math.exp(-t) / (64.0 * t * t)))
    return CheckResult("ultracontractivity", worst <= 1.0 + 1e-6,
                       f"max p_t / p_t(0, 0) = {worst:.9f}", {"max_ratio": worst})

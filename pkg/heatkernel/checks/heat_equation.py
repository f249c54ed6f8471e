"""|d_t p - L p| / |d_t p| at random interior points, finite-difference derivatives."""

import numpy as np

from heatkernel.checks import CheckResult
from heatkernel.kernel import heat_residual

SUITES = ("fast", "full")
TIMES = (0.25, 0.5, 1.0)
TOLERANCE = 1e-3


def run(suite: str = "fast") -> CheckResult:
    n_points = 50 if suite == "full" else 12
    rng = np.random.default_rng(20240501)
    t = rng.choice(TIMES, n_points)
    r = rng.uniform(0.2, 2.0, n_points)
    z = rng.uniform(-2.0, 2.0, n_points)
    residual = np.concatenate([heat_residual(float(tv), r[t == tv], z[t == tv]) for tv in TIMES if (t == tv).any()])
    worst = float(residual.max())
    return CheckResult("heat_equation", worst < TOLERANCE,
                       f"max residual {worst:.2e} over {n_points} points", {"max_residual": worst})

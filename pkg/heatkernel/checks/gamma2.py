"""
Gamma_2 >= 0 on random radial polynomials, and the three-square form against
the general bracket formula.
"""

import math

import numpy as np

from heatkernel.checks import CheckResult
from heatkernel.group import RadialFunction, _gamma2_general, gamma2_radial

SUITES = ("fast", "full")
N_POSITIVITY = 1000
N_FORMULA = 100


def _random_polynomial(rng) -> RadialFunction:
    return RadialFunction.polynomial(rng.normal(size=(4, 4)))


def run(suite: str = "fast") -> CheckResult:
    rng = np.random.default_rng(7)
    lowest = math.inf
    for _ in range(N_POSITIVITY):
        f = _random_polynomial(rng)
        r, z = rng.uniform(0.05, 2.5), rng.uniform(-math.pi, math.pi)
        lowest = min(lowest, float(gamma2_radial(f, r, z)))

    worst = 0.0
    for _ in range(N_FORMULA):
        f = _random_polynomial(rng)
        r, theta, z = rng.uniform(0.05, 2.5), rng.uniform(0.0, 2.0 * math.pi), rng.uniform(-math.pi, math.pi)
        p = f.partials(r, z)
        grad = (p.r, 0.0, p.z)
        hess = ((p.rr, 0.0, p.rz), (0.0, 0.0, 0.0), (p.rz, 0.0, p.zz))
        radial = float(gamma2_radial(f, r, z))
        general = _gamma2_general(grad, hess, r, theta, z)
        worst = max(worst, abs(radial - general) / max(1.0, abs(radial)))

    ok = lowest >= -1e-9 and worst <= 1e-6
    return CheckResult("gamma2", ok, f"min Gamma_2 {lowest:.3g}, max formula mismatch {worst:.2e}",
                       {"min_gamma2": lowest, "max_mismatch": worst})

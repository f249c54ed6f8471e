"""Total mass of the probability kernel over the chart."""

from heatkernel.checks import CheckResult
from heatkernel.constants import MASS_TIMES
from heatkernel.kernel import PROBABILITY, total_mass

SUITES = ("fast", "full")
TOLERANCE = 1e-4


def run(suite: str = "fast") -> CheckResult:
    times = MASS_TIMES if suite == "full" else (0.5,)
    masses = {t: total_mass(t, PROBABILITY) for t in times}
    worst = max(abs(m - 1.0) for m in masses.values())
    detail = ", ".join(f"t={t:g}: {m:.8f}" for t, m in masses.items())
    return CheckResult("normalization", worst <= TOLERANCE, detail,
                       {"max_abs_error": worst})

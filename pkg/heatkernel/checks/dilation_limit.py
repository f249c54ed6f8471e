"""t^2 p_t(sqrt(t) r, t z) / h_1(r, z) settles to one constant, measured at three points."""

from heatkernel.checks import CheckResult
from heatkernel.constants import DILATION_POINTS, DILATION_TOLERANCE
from heatkernel.heisenberg import measure_dilation_constant
from heatkernel.kernel import STANDARD

SUITES = ("fast", "full")


def run(suite: str = "fast") -> CheckResult:
    found = measure_dilation_constant(convention=STANDARD)
    ok = max(found.drift, found.spread, found.mismatch) <= DILATION_TOLERANCE
    return CheckResult(
        "dilation_limit", bool(ok),
        f"ratios at t={found.t:g}: {', '.join(f'{v:.4f}' for v in found.ratios)}; "
        f"kappa = {found.kappa:.4f} (spread {found.spread:.2%}), identified with {found.identified:g}",
        {"kappa": found.kappa, "kappa_identified": found.identified, "spread": found.spread,
         "drift": found.drift,
         **{f"ratio_{r:g}_{z:g}": float(v) for (r, z), v in zip(DILATION_POINTS, found.ratios)}},
    )

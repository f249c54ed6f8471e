"""
Acceptance checks. Each module exposes run(suite) -> CheckResult and a SUITES
tuple naming the suites it belongs to; run_checks imports them by name.
"""

from dataclasses import dataclass, field
import importlib
import sys
import time
import traceback

from tqdm import tqdm

CHECKS = {
    "on_diagonal":        "heatkernel.checks.on_diagonal",
    "axis_closed_form":   "heatkernel.checks.axis_closed_form",
    "normalization":      "heatkernel.checks.normalization",
    "semigroup":          "heatkernel.checks.semigroup",
    "heat_equation":      "heatkernel.checks.heat_equation",
    "distance_recovery":  "heatkernel.checks.distance_recovery",
    "laplace":            "heatkernel.checks.laplace",
    "constant_a":         "heatkernel.checks.constant_a",
    "liyau":              "heatkernel.checks.liyau",
    "gradient_bound":     "heatkernel.checks.gradient_bound",
    "harnack":            "heatkernel.checks.harnack",
    "reverse_poincare":   "heatkernel.checks.reverse_poincare",
    "gamma2":             "heatkernel.checks.gamma2",
    "ultracontractivity": "heatkernel.checks.ultracontractivity",
    "dilation_limit":     "heatkernel.checks.dilation_limit",
    "monte_carlo":        "heatkernel.checks.monte_carlo",
    "weak_order":         "heatkernel.checks.weak_order",
    "determinism":        "heatkernel.checks.determinism",
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_record(self) -> dict:
        return {"check": self.name, "status": "pass" if self.passed else "fail",
                "detail": self.detail, "elapsed": round(self.elapsed, 3), **self.metrics}


def run_checks(names=None, suite: str = "fast", progress: bool = False) -> list[CheckResult]:
    """Run the named checks (default: every check in the suite); a raising check fails."""
    selected = list(names) if names else list(CHECKS)
    results = []
    for name in tqdm(selected, desc=f"Self-test ({suite})", disable=not progress):
        t0 = time.time()
        try:
            mod = importlib.import_module(CHECKS[name])
            if not names and suite not in mod.SUITES:
                continue
            res = mod.run(suite)
        except Exception as e:
            res = CheckResult(name, False, f"{type(e).__name__}: {e}")
            traceback.print_exc(file=sys.stderr)
        res.elapsed = time.time() - t0
        results.append(res)
    return results


def print_summary(results: list[CheckResult]):
    print(f"\n{'=' * 60}", file=sys.stderr)
    print("Summary:", file=sys.stderr)
    print(f"{'=' * 60}", file=sys.stderr)
    for res in results:
        mark = "✓" if res.passed else "✗"
        print(f"  {mark} {res.name:20s} {res.elapsed:6.1f}s  {res.detail}", file=sys.stderr)
    passed = sum(res.passed for res in results)
    print(f"\n  {passed} passed, {len(results) - passed} failed", file=sys.stderr)

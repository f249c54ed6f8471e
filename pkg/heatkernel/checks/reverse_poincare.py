"""t C(t) -> 1 as t -> 0, C decreasing, and C(t) <= B(t) with alpha = t at large t."""

from heatkernel.checks import CheckResult
from heatkernel.inequalities import LiYauParams, constant_B, constant_C

SUITES = ("full",)
SCAN_TIMES = (0.2, 0.1, 0.05)
LARGE_TIMES = (3.0, 5.0)


def run(suite: str = "full") -> CheckResult:
    tc = [t * constant_C(t) for t in SCAN_TIMES]
    gaps = [abs(v - 1.0) for v in tc]
    c = [constant_C(t) for t in (0.25, 0.5, 1.0)]
    large = {t: (constant_C(t), constant_B(t, LiYauParams.for_large_time(t))) for t in LARGE_TIMES}
    ok = (gaps[-1] <= 0.15 and gaps[0] > gaps[1] > gaps[2] and c[0] > c[1] > c[2]
          and all(cv <= bv for cv, bv in large.values()))
    return CheckResult(
        "reverse_poincare", ok,
        f"t C(t) at t = 0.2, 0.1, 0.05: {', '.join(f'{v:.4f}' for v in tc)}; "
        f"C(0.25, 0.5, 1) = {', '.join(f'{v:.4g}' for v in c)}; "
        + ", ".join(f"C({t:g}) = {cv:.4g} <= B = {bv:.4g}" for t, (cv, bv) in large.items()),
        {"tC_small": tc[-1], **{f"tC_{t:g}": v for t, v in zip(SCAN_TIMES, tc)},
         "C_0.25": c[0], "C_0.5": c[1], "C_1": c[2],
         **{f"C_{t:g}": cv for t, (cv, _) in large.items()}, **{f"B_{t:g}": bv for t, (_, bv) in large.items()}},
    )

"""
Command-line interface: sl2-heat {kernel,distance,limit,ineq,mc,selftest}.

Records go to stdout (or --out) as JSON lines or CSV; progress and summaries
go to stderr. Grids are a scalar or start:stop:count with inclusive endpoints;
negative grids need the = form (--z=-2:2:10).

Exit codes: 0 success, 1 failed check, 2 usage or domain error,
3 numerical non-convergence (partial records plus a trailer record).

Usage:
    uv run sl2-heat kernel --t 1 --r 0 --z 0 --method axis
    uv run sl2-heat ineq --check liyau --alpha 3 --t 0.5
    uv run sl2-heat selftest --suite fast
"""

import argparse
import itertools
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from tqdm import tqdm

from heatkernel import checks
from heatkernel.asymptotics import asym_axis_z, asym_generic
from heatkernel.constants import (
    ASYM_R_CUTOFF, DEFAULT_ABS_TOL, DEFAULT_REL_TOL, DILATION_TIMES, EXIT_CHECK_FAILED,
    EXIT_NO_CONVERGENCE, EXIT_OK, EXIT_USAGE, LIYAU_ALPHA, LIYAU_EPS, MC_AGREEMENT_TARGET,
)
from heatkernel.distance import distance_squared, solve_theta
from heatkernel.errors import (
    ContinuationAmbiguous, ConvergenceFailure, DegenerateDensity, DomainError,
    ExtrapolationUnstable, NonCylindric, QuadratureNoConvergence, SingularAtAxis,
)
from heatkernel.group import CylCoord
from heatkernel.heisenberg import measure_dilation_constant
from heatkernel.inequalities import (
    LiYauParams, constant_A, constant_C, gradient_bound_check, harnack_spot_check, liyau_check,
    relative_spread,
)
from heatkernel.kernel import PROBABILITY, STANDARD, Convention, p_axis, p_integral
from heatkernel.montecarlo import (
    SCHEMES, MCConfig, density_vs_kernel, export_sample, simulate_paths, z_marginal_vs_kernel,
)
from heatkernel.quadrature import QuadSpec
from heatkernel.records import FORMATS, RecordWriter

log = logging.getLogger(__name__)

USAGE_ERRORS = (DomainError, SingularAtAxis, ContinuationAmbiguous, NonCylindric)
NUMERICAL_ERRORS = (QuadratureNoConvergence, ConvergenceFailure, ExtrapolationUnstable, DegenerateDensity)

INEQ_CHECKS = ("liyau", "gradient", "C", "A", "harnack")


# ── Argument parsing ──────────────────────────────────────────────────────────

def parse_grid(text: str) -> np.ndarray:
    """"x" -> [x]; "start:stop:count" -> count points, endpoints included."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 0:
                raise ValueError
            return np.linspace(start, stop, count)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a number or start:stop:count, got {text!r}")


def read_config(path: str | Path) -> list[str]:
    """key=value lines as --key=value arguments; '#' starts a comment, '_' and '-' are interchangeable."""
    args = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise DomainError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        flag = "--" + key.strip().replace("_", "-")
        value = value.strip()
        if value.lower() in ("true", "yes", "on"):
            args.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            args.append(f"{flag}={value}")
    return args


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="jsonl", help="Record format (default: jsonl)")
    common.add_argument("--out", help="Write records to FILE instead of stdout")
    common.add_argument("--config", help="key=value file merged under the flags")
    common.add_argument("--quiet", action="store_true", help="No progress output on stderr")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    common.add_argument("--abs-tol", type=float, default=DEFAULT_ABS_TOL, help="Quadrature absolute tolerance")
    common.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL, help="Quadrature relative tolerance")
    return common


def _normalization_option(parser: argparse.ArgumentParser, default: str = "standard"):
    parser.add_argument("--normalization", choices=("standard", "probability"), default=default,
                        help=f"Kernel normalization (default: {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sl2-heat",
                                     description="Subelliptic heat kernel on SL(2,R)")
    subs = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    p = subs.add_parser("kernel", parents=[common], help="Evaluate p_t(r, z) on a grid")
    p.add_argument("--t", type=parse_grid, required=True)
    p.add_argument("--r", type=parse_grid, default=parse_grid("0"))
    p.add_argument("--z", type=parse_grid, default=parse_grid("0"))
    p.add_argument("--method", choices=("integral", "axis", "asym"), default="integral")
    p.add_argument("--workers", type=int, default=1, help="Threads for the grid sweep")
    _normalization_option(p)
    p.set_defaults(handler=cmd_kernel)

    p = subs.add_parser("distance", parents=[common], help="Squared distance d^2(r, z) on a grid")
    p.add_argument("--r", type=parse_grid, required=True)
    p.add_argument("--z", type=parse_grid, default=parse_grid("0"))
    p.set_defaults(handler=cmd_distance)

    p = subs.add_parser("limit", parents=[common], help="Dilation limit t^2 p_t(sqrt(t) r, t z) / h_1(r, z)")
    p.add_argument("--t", type=parse_grid, default=np.array(DILATION_TIMES))
    p.add_argument("--r", type=parse_grid, default=parse_grid("0"))
    p.add_argument("--z", type=parse_grid, default=parse_grid("0"))
    _normalization_option(p)
    p.set_defaults(handler=cmd_limit)

    p = subs.add_parser("ineq", parents=[common], help="Functional-inequality sweeps and constants")
    p.add_argument("--check", choices=INEQ_CHECKS, required=True)
    p.add_argument("--t", type=parse_grid, required=True)
    p.add_argument("--t2", type=float, help="Later time of the Harnack pairs")
    p.add_argument("--r", type=parse_grid, default=parse_grid("0.2:2:10"))
    p.add_argument("--z", type=parse_grid, default=parse_grid("-2:2:10"))
    p.add_argument("--alpha", type=float, default=LIYAU_ALPHA)
    p.add_argument("--eps", type=float, default=LIYAU_EPS)
    p.add_argument("--exact-delta", action="store_true", help="Harnack: delta through the group law")
    p.set_defaults(handler=cmd_ineq)

    p = subs.add_parser("mc", parents=[common], help="Monte Carlo density versus the kernel")
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--scheme", choices=SCHEMES, default="exponential-increment")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bins", type=int, nargs=2, default=(20, 20), metavar=("NR", "NZ"))
    p.add_argument("--export", help="Write the path endpoints to FILE (.parquet or .csv)")
    p.set_defaults(handler=cmd_mc)

    p = subs.add_parser("selftest", parents=[common], help="Run the acceptance checks")
    p.add_argument("--suite", choices=("fast", "full"), default="fast")
    p.add_argument("--only", nargs="+", choices=list(checks.CHECKS), help="Run only these checks")
    p.set_defaults(handler=cmd_selftest)
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            extra = read_config(args.config)
        except (OSError, DomainError) as exc:
            parser.error(str(exc))
        at = argv.index(args.command) + 1
        # later occurrences win, so the command line overrides the file
        args = parser.parse_args(argv[:at] + extra + argv[at:])
    return args


# ── Helpers ───────────────────────────────────────────────────────────────────

def _status(args, message: str):
    if not args.quiet:
        print(message, file=sys.stderr)


def _quad(args) -> QuadSpec:
    return QuadSpec(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _convention(args) -> Convention:
    return PROBABILITY if args.normalization == "probability" else STANDARD


def _require_points(**grids):
    empty = [name for name, grid in grids.items() if len(grid) == 0]
    if empty:
        raise DomainError(f"empty grid for {', '.join('--' + n for n in empty)}")


# ── Subcommands ───────────────────────────────────────────────────────────────

def _kernel_record(t: float, r: float, z: float, method: str, q: QuadSpec, conv: Convention) -> dict:
    if method == "integral":
        kv = p_integral(t, r, z, q, conv)
        return {"t": t, "r": r, "z": z, "value": kv.value, "err_estimate": kv.err_estimate,
                "method": kv.method, "log_value": kv.log_value}
    if method == "axis" or (method == "asym" and r == 0.0 and z == 0.0):
        if r != 0.0:
            raise DomainError(f"--method axis needs r = 0, got r = {r!r}")
        value = p_axis(t, z, conv)
        return {"t": t, "r": r, "z": z, "value": value, "err_estimate": 0.0,
                "method": "axis", "log_value": math.log(value) if value > 0.0 else -math.inf}
    if r < ASYM_R_CUTOFF:
        value = conv.scale * asym_axis_z(t, abs(z))
    else:
        value = conv.scale * asym_generic(t, r, z).evaluate(t)
    return {"t": t, "r": r, "z": z, "value": value, "err_estimate": math.nan,
            "method": "asym", "log_value": math.log(value) if value > 0.0 else -math.inf}


def cmd_kernel(args, writer: RecordWriter) -> int:
    _require_points(t=args.t, r=args.r, z=args.z)
    points = [(float(t), float(r), float(z)) for t, r, z in itertools.product(args.t, args.r, args.z)]
    q, conv = _quad(args), _convention(args)
    _status(args, f"Evaluating {len(points)} grid points ({args.method}, {conv.normalization})...")
    job = lambda pt: _kernel_record(*pt, args.method, q, conv)
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        # map yields in grid order whatever the completion order
        for record in tqdm(pool.map(job, points), total=len(points), desc="Kernel", disable=args.quiet):
            writer.write(record)
    return EXIT_OK


def cmd_distance(args, writer: RecordWriter) -> int:
    _require_points(r=args.r, z=args.z)
    for r, z in itertools.product(args.r, args.z):
        r, z = float(r), float(z)
        dv = distance_squared(r, z)
        theta = solve_theta(r, z).theta if dv.case_tag == "generic" else math.nan
        writer.write({"r": r, "z": z, "theta": theta, "d2": dv.d2, "case_tag": dv.case_tag})
    return EXIT_OK


def cmd_limit(args, writer: RecordWriter) -> int:
    _require_points(t=args.t, r=args.r, z=args.z)
    conv = _convention(args)
    points = [(float(r), float(z)) for r, z in itertools.product(args.r, args.z)]
    _status(args, f"Dilation limit at {len(points)} point(s), {conv.normalization} normalization")
    found = measure_dilation_constant(args.t.tolist(), points, conv, _quad(args))
    for row in found.table.to_dict("records"):
        writer.write({**row, "kappa": found.kappa, "kappa_identified": found.identified})
    _status(args, f"kappa = {found.kappa:.6g} at t = {found.t:g} (spread {found.spread:.2%}), "
                  f"identified with {found.identified:g}")
    return EXIT_OK


def _ineq_liyau(args, writer: RecordWriter) -> int:
    params = LiYauParams(args.alpha)
    grid = list(itertools.product(args.r, args.z))
    counts = {"pass": 0, "fail": 0, "inconclusive": 0}
    for t in tqdm(args.t, desc="Li-Yau", disable=args.quiet):
        for rep in liyau_check(float(t), args.eps, grid, params, _quad(args), PROBABILITY):
            counts[rep.status] += 1
            writer.write({**rep.to_record(), "alpha": args.alpha, "eps": args.eps})
    _status(args, f"Li-Yau: {counts['pass']} pass, {counts['inconclusive']} inconclusive, "
                  f"{counts['fail']} fail")
    return EXIT_CHECK_FAILED if counts["fail"] else EXIT_OK


def _ineq_gradient(args, writer: RecordWriter) -> int:
    grid = list(itertools.product(args.r, args.z))
    c_hats = []
    for t in args.t:
        bound = gradient_bound_check(float(t), grid)
        c_hats.append(bound.c_hat)
        _status(args, f"t={float(t):g} ({bound.form}): C_hat = {bound.c_hat:.6g}")
        for row in bound.table.to_dict("records"):
            writer.write({"t": float(t), "form": bound.form, **row, "c_hat": bound.c_hat})
    if len(c_hats) > 1:
        _status(args, f"C_hat spread (max - min) / max = {relative_spread(c_hats):.3f}")
    return EXIT_OK


def _ineq_constant_c(args, writer: RecordWriter) -> int:
    for t in tqdm(args.t, desc="C(t)", disable=args.quiet):
        c = constant_C(float(t), _quad(args))
        writer.write({"t": float(t), "C": c, "tC": float(t) * c})
    return EXIT_OK


def _ineq_constant_a(args, writer: RecordWriter) -> int:
    for t in args.t:
        t = float(t)
        writer.write({"t": t, "A_standard": constant_A(t, STANDARD), "A_probability": constant_A(t, PROBABILITY),
                      "closed_form": math.exp(-2.0 * t) * (1.0 + t) / (512.0 * t**3)})
    return EXIT_OK


def _ineq_harnack(args, writer: RecordWriter) -> int:
    if args.t2 is None:
        raise DomainError("--check harnack needs --t2")
    points = [CylCoord(float(r), 0.0, float(z)) for r, z in itertools.product(args.r, args.z)]
    pairs = list(itertools.product(points, points))
    _status(args, f"Fitting Harnack constants on {len(pairs)} pairs...")
    for t1 in args.t:
        fit = harnack_spot_check(float(t1), args.t2, pairs, args.exact_delta, _quad(args))
        _status(args, f"({fit.t1:g}, {fit.t2:g}) {fit.form}: A1 = {fit.a1:.6g}, A2 = {fit.a2:.6g}")
        for row in fit.table.to_dict("records"):
            writer.write({"t1": fit.t1, "t2": fit.t2, "form": fit.form, **row, "a1": fit.a1, "a2": fit.a2})
    return EXIT_OK


_INEQ_HANDLERS = {
    "liyau": _ineq_liyau,
    "gradient": _ineq_gradient,
    "C": _ineq_constant_c,
    "A": _ineq_constant_a,
    "harnack": _ineq_harnack,
}


def cmd_ineq(args, writer: RecordWriter) -> int:
    _require_points(t=args.t, r=args.r, z=args.z)
    return _INEQ_HANDLERS[args.check](args, writer)


def cmd_mc(args, writer: RecordWriter) -> int:
    cfg = MCConfig(seed=args.seed, n_paths=args.paths, n_steps=args.steps, t_final=args.t,
                   scheme=args.scheme, workers=args.workers, bins=tuple(args.bins))
    _status(args, f"Simulating {cfg.n_paths:,} paths, {cfg.n_steps} steps to t={cfg.t_final:g}...")
    t0 = time.time()
    sample = simulate_paths(cfg, progress=not args.quiet)
    if args.export:
        path = export_sample(sample, args.export)
        _status(args, f"  Wrote {len(sample.frame):,} endpoints to {path}")
    comparison = density_vs_kernel(cfg, sample)
    marginal = z_marginal_vs_kernel(cfg, sample)
    writer.write_many(comparison.to_frame().to_dict("records"))
    _status(args, f"  {comparison.occupied_bins} occupied bins, agreement {comparison.agreement:.1%}, "
                  f"z marginal {marginal.agreement:.1%}, "
                  f"z-symmetry p = {comparison.symmetry_pvalue:.3g}, "
                  f"max |det - 1| = {comparison.max_det_error:.2g} ({time.time() - t0:.1f}s)")
    ok = (comparison.agreement >= MC_AGREEMENT_TARGET and comparison.symmetry_pvalue >= 0.05
          and marginal.agreement >= MC_AGREEMENT_TARGET)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_selftest(args, writer: RecordWriter) -> int:
    results = checks.run_checks(args.only, args.suite, progress=not args.quiet)
    for res in results:
        writer.write(res.to_record())
    if not args.quiet:
        checks.print_summary(results)
    return EXIT_OK if all(res.passed for res in results) else EXIT_CHECK_FAILED


# ── Entry point ───────────────────────────────────────────────────────────────

def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    with RecordWriter(args.format, args.out) as writer:
        try:
            return args.handler(args, writer)
        except USAGE_ERRORS as exc:
            print(f"error: {exc}", file=sys.stderr)
            if writer.count:
                writer.trailer("error", str(exc), EXIT_USAGE)
            return EXIT_USAGE
        except NUMERICAL_ERRORS as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            extra = {}
            if isinstance(exc, QuadratureNoConvergence):
                extra = {"value": exc.value, "err_estimate": exc.err_estimate}
            writer.trailer("error", str(exc), EXIT_NO_CONVERGENCE, **extra)
            return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())

"""
Run the acceptance checks from a source checkout; same as `sl2-heat selftest`
without the records.

Usage:
    uv run python run_checks.py [--suite fast|full] [--only NAME ...] [--list]
"""

import argparse
import sys

from heatkernel.checks import CHECKS, print_summary, run_checks


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Run the heat-kernel acceptance checks")
    parser.add_argument("--suite", choices=["fast", "full"], default="full")
    parser.add_argument("--only", nargs="+", choices=list(CHECKS), help="Run only these checks")
    parser.add_argument("--list", action="store_true", help="List the check names and exit")
    args = parser.parse_args(argv)

    if args.list:
        print("\n".join(CHECKS))
        return 0
    results = run_checks(args.only, args.suite, progress=True)
    print_summary(results)
    return 0 if all(res.passed for res in results) else 1


if __name__ == "__main__":
    sys.exit(main())

"""tubeverify: run verification suites and write a JSON or CSV report.

Exit status is 0 when every non-diagnostic check passes, 1 otherwise and 2
for a bad configuration.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

from .errors import ConfigError
from .report import REL_TOL, dumps_report, emit_report
from .suites import SUITES, SuiteConfig, run_suite

DEFAULT_SEED = 20240917
SEED_ENV = "TUBEVERIFY_SEED"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tubeverify", description=__doc__.splitlines()[0])
    p.add_argument("suite", help="suite name or 'all': " + ", ".join(SUITES))
    p.add_argument("--n", type=int, default=None, help="complex dimension (default: per suite)")
    p.add_argument("--alpha", type=float, default=None, help="weight exponent alpha > -1")
    p.add_argument("--samples", type=int, default=None, help="Monte Carlo samples per integral")
    p.add_argument("--seed", type=int, default=None,
                   help=f"root seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--kappa", type=float, default=None,
                   help="ball-side sampling exponent (default: alpha)")
    p.add_argument("--rel-tol", type=float, default=REL_TOL, help="relative tolerance of MC checks")
    p.add_argument("--jobs", type=int, default=1, help="checks run in parallel (order is kept)")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--no-timing", action="store_true",
                   help="write 0 for wall times so reports are byte-identical across runs")
    return p


def resolve_seed(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def configs_from_args(args) -> list:
    seed = resolve_seed(args.seed)
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    names = list(SUITES) if args.suite == "all" else [args.suite]
    return [SuiteConfig(suite=s, n=args.n, alpha=args.alpha, samples=args.samples, seed=seed,
                        kappa=args.kappa, rel_tol=args.rel_tol, jobs=args.jobs, out=args.out,
                        fmt=args.fmt) for s in names]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configs = configs_from_args(args)
    except ConfigError as exc:
        print(f"tubeverify: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    reports = []
    for c in configs:
        reports += run_suite(c)
    elapsed = time.perf_counter() - t0

    timing = not args.no_timing
    config = configs[0].as_dict()
    try:
        if args.out:
            emit_report(reports, args.fmt, args.out, args.suite, config, timing)
        else:
            sys.stdout.write(dumps_report(reports, args.fmt, args.suite, config, timing))
    except OSError as exc:
        print(f"tubeverify: {exc}", file=sys.stderr)
        return 2

    failed = [r for r in reports if not r.passed and not r.diagnostic]
    for r in failed:
        print(f"FAIL {r.id}: observed {r.observed!r}, expected {r.expected!r}, tol {r.tol:.3g}"
              + (f" ({r.note})" if r.note else ""), file=sys.stderr)
    core = sum(not r.diagnostic for r in reports)
    print(f"tubeverify {args.suite}: {core - len(failed)}/{core} checks pass, "
          f"{sum(r.diagnostic for r in reports)} diagnostic, {elapsed:.1f}s", file=sys.stderr)
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance criteria 1-10: each suite at its default configuration and runtime limit.

Every criterion prints a single PASS/FAIL line.  Diagnostic checks (printed
forms that the numerics reject) are reported but never decide the outcome.
"""

import time

import pytest

from tubebergman.cli import DEFAULT_SEED
from tubebergman.suites import SuiteConfig, run_suite

CRITERIA = [
    (1, "identities", 5),
    (2, "jacobians", 10),
    (3, "forelli-rudin", 30),
    (4, "metric", 60),
    (5, "gradient-laplacian", 60),
    (6, "kernels", 120),
    (7, "representation", 120),
    (8, "oscillation", 300),
    (9, "decomposition", 300),
    (10, "divergence", 120),
]


@pytest.mark.parametrize("number,suite,limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, limit, capsys):
    t0 = time.perf_counter()
    reports = run_suite(SuiteConfig(suite, seed=DEFAULT_SEED))
    elapsed = time.perf_counter() - t0
    failed = [r for r in reports if not r.passed and not r.diagnostic]
    ok = bool(reports) and not failed and elapsed < limit
    diag = sum(r.diagnostic for r in reports)
    core = len(reports) - diag
    line = (f"criterion {number:2d} {suite:<18} {'PASS' if ok else 'FAIL'}  "
            f"{core - len(failed)}/{core} checks, {diag} diagnostic, {elapsed:.1f}s (limit {limit}s)")
    with capsys.disabled():
        print("\n" + line)
        for r in failed:
            print(f"    failed {r.id}: observed {r.observed!r}, expected {r.expected!r}, "
                  f"tol {r.tol:.3g} {r.note}")
    assert reports, "suite produced no checks"
    assert not failed, [r.id for r in failed]
    assert elapsed < limit

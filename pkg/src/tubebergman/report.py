"""Check reports and their JSON / CSV serialisation.

Floats are written with 17 significant digits so a report round-trips
bit-for-bit; complex values are written as [re, im] pairs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = ["CheckReport", "tolerance", "make_check", "emit_report", "dumps_report",
           "parse_report", "REL_TOL"]

REL_TOL = 2e-2

PROVENANCE = ("PAPER", "DERIVED", "TRIVIAL")


def tolerance(expected, stderr: float = 0.0, rel_tol: float = REL_TOL, abs_tol: float = 0.0) -> float:
    """max(3 stderr, rel_tol |expected|, abs_tol)."""
    return float(max(3 * stderr, rel_tol * abs(expected), abs_tol))


@dataclass
class CheckReport:
    id: str
    anchor: str
    expected: complex
    provenance: str
    observed: complex
    stderr: float = 0.0
    tol: float = 0.0
    passed: bool = False
    seconds: float = 0.0
    diagnostic: bool = False
    note: str = ""

    def __post_init__(self):
        tag = self.provenance.split(":")[0].strip()
        if tag not in PROVENANCE:
            raise ValueError(f"unknown provenance tag {self.provenance!r}")

    @property
    def error(self) -> float:
        return float(abs(self.observed - self.expected))


def _scalar(x):
    x = complex(x) if np.iscomplexobj(x) else x
    if isinstance(x, complex):
        return x.real if x.imag == 0 else x
    return float(x)


def make_check(id: str, anchor: str, expected, observed, provenance: str, stderr: float = 0.0,
               rel_tol: float = REL_TOL, abs_tol: float = 0.0, tol: Optional[float] = None,
               diagnostic: bool = False, note: str = "", seconds: float = 0.0) -> CheckReport:
    """Build a report whose pass flag is |observed - expected| <= tol.

    By default tol = max(3 stderr, rel_tol |expected|, abs_tol).  Inequality
    checks pass their violation count as ``observed`` with expected 0, tol 0.
    """
    expected, observed = _scalar(expected), _scalar(observed)
    if tol is None:
        tol = tolerance(expected, stderr, rel_tol, abs_tol)
    err = abs(observed - expected)
    ok = bool(math.isfinite(err) and err <= tol)
    return CheckReport(id=id, anchor=anchor, expected=expected, provenance=provenance,
                       observed=observed, stderr=float(stderr), tol=float(tol), passed=ok,
                       seconds=float(seconds), diagnostic=diagnostic, note=note)


def _num(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def _value(x):
    if isinstance(x, complex):
        return f"[{_num(x.real)}, {_num(x.imag)}]"
    return _num(x)


def _encode(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _encode(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float, complex, np.floating, np.integer, np.complexfloating)):
        if isinstance(obj, (np.floating, np.integer, np.complexfloating)):
            obj = obj.item()
        return _value(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _check_dict(r: CheckReport, timing: bool):
    d = {"id": r.id, "anchor": r.anchor, "expected": r.expected, "provenance": r.provenance,
         "observed": r.observed, "stderr": r.stderr, "tol": r.tol, "pass": r.passed,
         "seconds": r.seconds if timing else 0.0, "diagnostic": r.diagnostic, "note": r.note}
    return d


def dumps_report(reports, fmt: str = "json", suite: str = "", config: Optional[dict] = None,
                 timing: bool = True) -> str:
    reports = list(reports)
    if fmt == "json":
        doc = {
            "suite": suite,
            "config": dict(config or {}),
            "checks": [_check_dict(r, timing) for r in reports],
            "all_pass": all(r.passed for r in reports if not r.diagnostic),
        }
        return _encode(doc) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        cols = ["id", "anchor", "expected_re", "expected_im", "provenance", "observed_re",
                "observed_im", "stderr", "tol", "pass", "seconds", "diagnostic", "note"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in reports:
            e, o = complex(r.expected), complex(r.observed)
            w.writerow([r.id, r.anchor, "%.17g" % e.real, "%.17g" % e.imag, r.provenance,
                        "%.17g" % o.real, "%.17g" % o.imag, "%.17g" % r.stderr, "%.17g" % r.tol,
                        int(r.passed), "%.17g" % (r.seconds if timing else 0.0),
                        int(r.diagnostic), r.note])
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(reports, fmt: str, path, suite: str = "", config: Optional[dict] = None,
                timing: bool = True) -> None:
    text = dumps_report(reports, fmt, suite, config, timing)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _parse_value(v):
    if isinstance(v, list):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return float(v)
    return float(v)


def parse_report(text: str, fmt: str = "json") -> list:
    """Inverse of dumps_report for the list of checks."""
    out = []
    if fmt == "json":
        doc = json.loads(text)
        for c in doc["checks"]:
            out.append(CheckReport(id=c["id"], anchor=c["anchor"], expected=_parse_value(c["expected"]),
                                   provenance=c["provenance"], observed=_parse_value(c["observed"]),
                                   stderr=float(c["stderr"]), tol=float(c["tol"]), passed=c["pass"],
                                   seconds=float(c["seconds"]), diagnostic=c["diagnostic"],
                                   note=c["note"]))
        return out
    if fmt == "csv":
        for row in csv.DictReader(io.StringIO(text)):
            def cx(prefix):
                re_, im_ = float(row[prefix + "_re"]), float(row[prefix + "_im"])
                return complex(re_, im_) if im_ != 0 else re_
            out.append(CheckReport(id=row["id"], anchor=row["anchor"], expected=cx("expected"),
                                   provenance=row["provenance"], observed=cx("observed"),
                                   stderr=float(row["stderr"]), tol=float(row["tol"]),
                                   passed=row["pass"] == "1", seconds=float(row["seconds"]),
                                   diagnostic=row["diagnostic"] == "1", note=row["note"]))
        return out
    raise ValueError(f"unknown report format {fmt!r}")

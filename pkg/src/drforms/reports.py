"""Identity reports: both sides, the residual valuation and the certified valuation.

Valuations are v = -log_q|x|, written as integers in units of 1/e where e is
the common ramification index recorded in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .cinfty import CInftyValue
from .tate import TateSeries


@dataclass
class IdentityReport:
    name: str
    params: dict
    lhs: object
    rhs: object
    residual_valuation: int | None
    certified_valuation: int | None
    ramification: int
    passed: bool
    first_failure: dict | None = None
    relative_digits: Fraction | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual_valuation": self.residual_valuation,
            "certified_valuation": self.certified_valuation,
            "ramification": self.ramification,
            "pass": self.passed,
            "first_failure": self.first_failure,
            "relative_digits": None if self.relative_digits is None else str(self.relative_digits),
            **({"extra": self.extra} if self.extra else {}),
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        digits = "-" if self.relative_digits is None else str(self.relative_digits)
        return f"{status} {self.name} {self.params} certified_valuation={self.certified_valuation} digits={digits}"


def _units(x: Fraction | None, e: int) -> int | None:
    return None if x is None else int(-x * e)


def _size(v: CInftyValue):
    return v.size_deg()


def compare_values(name: str, params: dict, lhs: CInftyValue, rhs: CInftyValue, extra=None) -> IdentityReport:
    return compare_vectors(name, params, [lhs], [rhs], extra=extra)


def compare_vectors(name: str, params: dict, lhs, rhs, extra=None) -> IdentityReport:
    """Entrywise comparison of two equal-length lists of CInftyValue."""
    diffs = [a - b for a, b in zip(lhs, rhs)]
    e = lcm(*(d.e for d in diffs))
    residual = None
    certified = None
    first = None
    digits = None
    for i, (a, b, d) in enumerate(zip(lhs, rhs, diffs)):
        err = d.err_deg
        if err is not None:
            certified = err if certified is None else max(certified, err)
            sizes = [_size(x) for x in (a, b) if not x.is_zero_to_precision()]
            if sizes:
                rel = max(sizes) - err
                digits = rel if digits is None else min(digits, rel)
        if not d.is_zero_to_precision():
            residual = d.deg if residual is None else max(residual, d.deg)
            if first is None:
                first = {"index": i, "lhs": a.to_json(), "rhs": b.to_json(), "difference": d.to_json()}
    return IdentityReport(
        name=name,
        params=params,
        lhs=[a.to_json() for a in lhs],
        rhs=[b.to_json() for b in rhs],
        residual_valuation=_units(residual, e),
        certified_valuation=_units(certified, e),
        ramification=e,
        passed=first is None,
        first_failure=first,
        relative_digits=digits,
        extra=extra or {},
    )


def compare_series(name: str, params: dict, lhs: TateSeries, rhs: TateSeries, extra=None) -> IdentityReport:
    """Coefficientwise comparison to the common truncation order."""
    N = min(lhs.N, rhs.N)
    report = compare_vectors(name, params, list(lhs.coeffs[:N]), list(rhs.coeffs[:N]), extra=extra)
    report.params = {**params, "N": N}
    return report


def compare_series_vectors(name: str, params: dict, lhs, rhs, extra=None) -> IdentityReport:
    """Comparison of lists of TateSeries, flattened in (entry, coefficient) order."""
    a, b = [], []
    for x, y in zip(lhs, rhs):
        N = min(x.N, y.N)
        a += list(x.coeffs[:N])
        b += list(y.coeffs[:N])
    report = compare_vectors(name, params, a, b, extra=extra)
    if report.first_failure is not None:
        N = min(lhs[0].N, rhs[0].N)
        i = report.first_failure["index"]
        report.first_failure.update(entry=i // N, coefficient=i % N)
    return report


def merge(name: str, params: dict, reports) -> IdentityReport:
    """One report that passes iff every part passes."""
    reports = list(reports)
    failed = [r for r in reports if not r.passed]
    e = lcm(*(r.ramification for r in reports))
    certified = [Fraction(r.certified_valuation, r.ramification) for r in reports if r.certified_valuation is not None]
    residual = [Fraction(r.residual_valuation, r.ramification) for r in reports if r.residual_valuation is not None]
    digits = [r.relative_digits for r in reports if r.relative_digits is not None]
    return IdentityReport(
        name=name,
        params=params,
        lhs=[r.name for r in reports],
        rhs=None,
        residual_valuation=int(min(residual) * e) if residual else None,
        certified_valuation=int(min(certified) * e) if certified else None,
        ramification=e,
        passed=not failed,
        first_failure=None if not failed else {"part": failed[0].name, **(failed[0].first_failure or {})},
        relative_digits=min(digits) if digits else None,
        extra={"parts": [r.to_json() for r in reports]},
    )

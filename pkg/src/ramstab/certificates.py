"""Stability predicates and machine-checkable certificates.

A branch is tamely ramification-stable (TRS) over its ground field when p
does not divide d, the stable polygon description holds from level 0, and
the transition functions compose without overlap (each identity segment
covers all earlier vertices).  Certification here is sound but not
minimal: it scans recorded levels for effectively checkable sufficient
conditions, so the reindex level it reports may be larger than the true
minimum.  Every inequality that was checked is embedded in the certificate
with its exact values, so a certificate can be re-validated without
recomputing anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .branches import (
    BranchValuationRecord,
    PolynomialValuationProfile,
    estimate_d,
)
from .limitdata import LimitingRamificationData, limiting_data
from .valuations import ensure_fraction

__all__ = [
    "CertificateCheck",
    "StabilityCertificate",
    "pcb_normal_form",
    "composition_criterion",
    "pcb_sufficient",
    "certify",
    "evaluate_check",
    "revalidate",
]

INTERPRETATION_NOTES = (
    "d-divisibility is checked on the numerator of the minimal-ramification "
    "estimate v(a_n) * lcm(denominator, e_ke)",
    "for non-integer positive base valuations the halving bound uses "
    "ceil(v(a_0))",
    "certificates are sound but not minimal: the reindex level comes from "
    "effectively checkable sufficient conditions and may exceed the true one",
)

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "not-divides": lambda a, b: b % a != 0,
}


@dataclass(frozen=True)
class CertificateCheck:
    """One recorded comparison: exact left/right values, operator, outcome."""

    name: str
    level: Optional[int]
    lhs: str
    op: str
    rhs: str
    passed: bool

    @property
    def rendered(self) -> str:
        where = "" if self.level is None else f" at level {self.level}"
        verdict = "holds" if self.passed else "fails"
        return f"{self.name}{where}: {self.lhs} {self.op} {self.rhs} {verdict}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "level": self.level,
            "lhs": self.lhs,
            "op": self.op,
            "rhs": self.rhs,
            "passed": self.passed,
            "rendered": self.rendered,
        }


def evaluate_check(lhs: str, op: str, rhs: str) -> bool:
    """Re-evaluate a recorded comparison from its exact serialized values."""
    if op not in _OPS:
        raise ValueError(f"unknown comparison operator {op!r}")
    a, b = Fraction(lhs), Fraction(rhs)
    return _OPS[op](a, b)


def revalidate(certificate: "StabilityCertificate") -> bool:
    """True iff every embedded check reproduces its recorded pass/fail bit."""
    return all(
        evaluate_check(c.lhs, c.op, c.rhs) == c.passed for c in certificate.checks
    )


@dataclass(frozen=True)
class StabilityCertificate:
    """Outcome of certification with every checked inequality embedded.

    kind is "TRS", "PotentiallyTRS" or "NotCertified"; reindex is the level
    N at which the branch was certified (0 for TRS).  When d was estimated
    rather than supplied, conditional_on_d is set and the certificate only
    holds if the estimate is correct.
    """

    kind: str
    reindex: int
    d_used: int
    d_trusted: bool
    conditional_on_d: bool
    checks: Tuple[CertificateCheck, ...]
    interpretation_notes: Tuple[str, ...] = INTERPRETATION_NOTES
    reason: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("TRS", "PotentiallyTRS", "NotCertified"):
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.kind == "TRS":
            if self.reindex != 0:
                raise ValueError("a TRS certificate must have reindex 0")
            if not all(c.passed for c in self.checks):
                raise ValueError("a TRS certificate cannot contain failed checks")
        if self.kind == "PotentiallyTRS":
            if self.reindex < 0:
                raise ValueError("reindex must be nonnegative")
            bad = [
                c
                for c in self.checks
                if (c.level is None or c.level == self.reindex) and not c.passed
            ]
            if bad:
                raise ValueError(f"certified level has failed checks: {bad[0].rendered}")

    @property
    def certified(self) -> bool:
        return self.kind != "NotCertified"

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "reindex": self.reindex,
            "d_used": self.d_used,
            "d_trusted": self.d_trusted,
            "conditional_on_d": self.conditional_on_d,
            "checks": [c.to_json() for c in self.checks],
            "interpretation_notes": list(self.interpretation_notes),
        }
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def pcb_normal_form(profile: PolynomialValuationProfile) -> Tuple[bool, Optional[int]]:
    """Whether v(P_i) + v(i) >= r*v(p) holds for every index 1 <= i <= q.

    Polynomials in this normal form have all critical orbits bounded.  On
    failure the first violating index is returned as a witness.
    """
    target = profile.r * profile.v_p
    for i in range(1, profile.q + 1):
        vi = 0
        m = i
        while m % profile.p == 0:
            vi += 1
            m //= profile.p
        total = profile.coefficient_valuation(i) + vi * profile.v_p
        if total < target:
            return False, i
    return True, None


def composition_criterion(
    data: LimitingRamificationData, v_base, p: int, q: int
) -> Tuple[bool, Tuple[CertificateCheck, ...]]:
    """Sufficient condition for identity segments to cover all earlier vertices.

    Automatic when the limiting polygon has a single slope (V = 2);
    otherwise the steepest limiting slope must beat the shallowest by a
    factor q with margin 2|v(a_0)|/(p-1):

        -q (m_V - m_{V-1}) / (p^{r_V} - p^{r_{V-1}})
            >  -(m_2 - m_1) / (p^{r_2} - p^{r_1})  +  2 |v(a_0)| / (p - 1)
    """
    v_base = ensure_fraction(v_base)
    if data.V == 2:
        check = CertificateCheck(
            name="single-limiting-slope",
            level=None,
            lhs=str(data.V),
            op="==",
            rhs="2",
            passed=True,
        )
        return True, (check,)
    lhs = -Fraction(q) * Fraction(
        data.M[-1] - data.M[-2], p ** data.R[-1] - p ** data.R[-2]
    )
    rhs = -Fraction(data.M[1] - data.M[0], p ** data.R[1] - p ** data.R[0]) + Fraction(
        2, p - 1
    ) * abs(v_base)
    passed = lhs > rhs
    check = CertificateCheck(
        name="composition-criterion",
        level=None,
        lhs=str(lhs),
        op=">",
        rhs=str(rhs),
        passed=passed,
    )
    return passed, (check,)


def pcb_sufficient(p: int, v_p, v_base) -> bool:
    """Small-base-valuation test: |v(a_0)| < (p - 1) v(p) / 2.

    Together with the bounded-critical-orbit normal form this guarantees
    the composition criterion without evaluating it.
    """
    return abs(ensure_fraction(v_base)) < Fraction(p - 1) * ensure_fraction(v_p) / 2


def _at_level(checks: Sequence[CertificateCheck], level: int):
    return tuple(
        CertificateCheck(c.name, level, c.lhs, c.op, c.rhs, c.passed) for c in checks
    )


def certify(
    profile: PolynomialValuationProfile,
    record: BranchValuationRecord,
    d: Optional[int] = None,
) -> StabilityCertificate:
    """Scan recorded levels for the first where every stability check passes.

    d comes from the caller (trusted), from the uniformizer-base rule
    (trusted), or from the minimal-ramification estimate (the certificate
    is then marked conditional on d).  A level passes when the composition
    criterion holds at its base valuation and the stable-regime screen
    holds there: |v| <= 1/q^2 with the d-estimate settled and prime to p
    and v below every non-leading coefficient valuation.  A uniformizer
    base (v(a_0) * e_ke = 1) passes the screen at level 0 outright, since
    every level is then Eisenstein.
    """
    p, q = profile.p, profile.q
    est, est_trusted = estimate_d(record)
    if d is not None:
        d_used, d_trusted = d, True
    else:
        d_used, d_trusted = est, est_trusted
    checks: list[CertificateCheck] = []

    tame = CertificateCheck(
        name="d-prime-to-p",
        level=None,
        lhs=str(p),
        op="not-divides",
        rhs=str(abs(d_used)),
        passed=abs(d_used) % p != 0,
    )
    checks.append(tame)
    if not tame.passed:
        return StabilityCertificate(
            kind="NotCertified",
            reindex=0,
            d_used=d_used,
            d_trusted=d_trusted,
            conditional_on_d=False,
            checks=tuple(checks),
            reason=f"p = {p} divides d = {d_used}; tameness fails",
        )

    data = limiting_data(profile, record.sign)
    threshold = Fraction(1, q * q)
    coeff_floor = profile.min_nonleading_valuation()

    for n, v in enumerate(record.valuations):
        if v.is_infinite:
            continue
        f = v.finite()
        level_checks: list[CertificateCheck] = []

        comp_ok, comp_checks = composition_criterion(data, f, p, q)
        level_checks.extend(_at_level(comp_checks, n))

        screen_ok = False
        if n == 0 and f * profile.e_ke == 1:
            level_checks.append(
                CertificateCheck(
                    name="uniformizer-base",
                    level=0,
                    lhs=str(f * profile.e_ke),
                    op="==",
                    rhs="1",
                    passed=True,
                )
            )
            screen_ok = True
        else:
            c_threshold = CertificateCheck(
                name="valuation-threshold",
                level=n,
                lhs=str(abs(f)),
                op="<=",
                rhs=str(threshold),
                passed=abs(f) <= threshold,
            )
            d_n = record.d_estimates[n]
            tail = record.d_estimates[n:]
            # settled run: entries from n to the end of the record, all equal
            run = len(tail) if all(e == d_n for e in tail) else 0
            c_settled = CertificateCheck(
                name="d-estimate-settled",
                level=n,
                lhs=str(run),
                op=">=",
                rhs="2",
                passed=run >= 2,
            )
            c_tame_n = CertificateCheck(
                name="d-estimate-prime-to-p",
                level=n,
                lhs=str(p),
                op="not-divides",
                rhs=str(abs(d_n)),
                passed=abs(d_n) % p != 0,
            )
            if coeff_floor.is_finite:
                c_below = CertificateCheck(
                    name="valuation-below-coefficients",
                    level=n,
                    lhs=str(f),
                    op="<",
                    rhs=str(coeff_floor.finite()),
                    passed=f < coeff_floor.finite(),
                )
            else:
                # vacuous: no non-leading coefficients to compare against
                c_below = CertificateCheck(
                    name="valuation-below-coefficients",
                    level=n,
                    lhs=str(f),
                    op="==",
                    rhs=str(f),
                    passed=True,
                )
            level_checks.extend([c_threshold, c_settled, c_tame_n, c_below])
            screen_ok = all(
                c.passed for c in (c_threshold, c_settled, c_tame_n, c_below)
            )

        checks.extend(level_checks)
        if comp_ok and screen_ok:
            kind = "TRS" if n == 0 else "PotentiallyTRS"
            return StabilityCertificate(
                kind=kind,
                reindex=n,
                d_used=d_used,
                d_trusted=d_trusted,
                conditional_on_d=not d_trusted,
                checks=tuple(checks),
            )

    return StabilityCertificate(
        kind="NotCertified",
        reindex=0,
        d_used=d_used,
        d_trusted=d_trusted,
        conditional_on_d=not d_trusted,
        checks=tuple(checks),
        reason="no recorded level passes both the composition criterion and the stability screen",
    )

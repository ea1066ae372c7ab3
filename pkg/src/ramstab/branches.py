"""Valuation dynamics along a branch of backward iterates.

A branch is a compatible sequence (a_0, a_1, ...) with P(a_n) = a_{n-1};
only the valuations of its members matter here.  From the polygon of
P(x) - a_{n-1} the possible valuations of a_n are exactly the negated
segment slopes, so a recorded branch can be validated step by step and
extended through forced (single-slope) steps.

The quantity d (the eventual valuation of a_n measured against a
uniformizer of its own level) is NOT computable from valuations alone.
The estimator here assumes minimal ramification at each level and always
reports its trust level; trusted values come only from the caller or from
a uniformizer base point, where every level is Eisenstein and d = 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Tuple

from .polygons import lower_hull
from .valuations import (
    INFINITY,
    ExtendedRational,
    _check_prime,
    as_extended,
    ensure_fraction,
    format_rational,
)

__all__ = [
    "PolynomialValuationProfile",
    "BranchValuationRecord",
    "BranchDataError",
    "branch_step_candidates",
    "zero_departure_candidates",
    "predict_branch",
    "build_record",
    "extend_record",
    "semistable_a_bound",
    "minimal_d_estimate",
    "estimate_d",
    "find_stable_index",
]

log = logging.getLogger(__name__)


class BranchDataError(ValueError):
    """Raised for branch data that violates the valuation-dynamics invariants."""


@dataclass(frozen=True)
class PolynomialValuationProfile:
    """Valuation data of a monic degree-q polynomial congruent to x^q mod pi.

    ``coeff_valuations`` maps indices 1..q to integer valuations in the
    value group; absent indices are zero coefficients (valuation infinity).
    The normalization is v(E) = Z for a subfield E over which the ground
    field K has ramification index ``e_ke``, and ``v_p`` = v(p).
    """

    p: int
    r: int
    v_p: int
    coeff_valuations: Mapping[int, int]
    e_ke: int = 1

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2:
            raise ValueError(f"p must be an integer >= 2, got {self.p!r}")
        if not _check_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not isinstance(self.r, int) or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r!r}")
        if not isinstance(self.v_p, int) or self.v_p < 1:
            raise ValueError(f"v_p must be a positive integer, got {self.v_p!r}")
        if not isinstance(self.e_ke, int) or self.e_ke < 1:
            raise ValueError(f"e_ke must be a positive integer, got {self.e_ke!r}")
        q = self.q
        coeffs = dict(self.coeff_valuations)
        object.__setattr__(self, "coeff_valuations", coeffs)
        for i, v in coeffs.items():
            if not isinstance(i, int) or not 1 <= i <= q:
                raise ValueError(f"coefficient index {i!r} outside 1..{q}")
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"coeff_valuations[{i}] must be a nonnegative integer, got {v!r}")
            if i < q and v < 1:
                raise ValueError(
                    f"coeff_valuations[{i}] must be >= 1 for non-leading coefficients "
                    "(the polynomial is congruent to x^q modulo the maximal ideal)"
                )
        if coeffs.get(q) != 0:
            raise ValueError(f"coeff_valuations[{q}] must be present and 0 (monic)")

    @property
    def q(self) -> int:
        return self.p**self.r

    def coefficient_valuation(self, i: int) -> ExtendedRational:
        """Total accessor: absent (zero) coefficients have infinite valuation."""
        if i in self.coeff_valuations:
            return ExtendedRational(self.coeff_valuations[i])
        return INFINITY

    def min_nonleading_valuation(self):
        """Smallest finite valuation among coefficients of index < q; INFINITY if none."""
        finite = [v for i, v in self.coeff_valuations.items() if i < self.q]
        if not finite:
            return INFINITY
        return ExtendedRational(min(finite))

    def max_coefficient_valuation(self) -> int:
        return max(self.coeff_valuations.values())


@dataclass(frozen=True)
class BranchValuationRecord:
    """Recorded (and possibly extended) valuations along one branch.

    Leading infinite entries are base points equal to zero; after the first
    finite entry all valuations are finite, nonzero and share one sign.
    ``d_estimates`` aligns with ``valuations`` (None on infinite entries),
    ``stable_index`` is the first level passing the stability screen, and
    ``C`` is filled in by the limiting-data pipeline.
    """

    valuations: Tuple[ExtendedRational, ...]
    d_estimates: Tuple[Optional[int], ...]
    stable_index: Optional[int]
    C: Optional[Fraction]
    q: int
    p: int
    e_ke: int

    @property
    def leading_zeros(self) -> int:
        count = 0
        for v in self.valuations:
            if not v.is_infinite:
                break
            count += 1
        return count

    @property
    def sign(self) -> int:
        """Sign of the base valuation (+1 for branches that start at zero)."""
        for v in self.valuations:
            if v.is_finite:
                return 1 if v.finite() > 0 else -1
        return 1

    def first_finite(self) -> Optional[Fraction]:
        for v in self.valuations:
            if v.is_finite:
                return v.finite()
        return None

    def to_json(self) -> dict:
        return {
            "valuations": [format_rational(v) for v in self.valuations],
            "d_estimates": list(self.d_estimates),
            "stable_index": self.stable_index,
            "C": None if self.C is None else format_rational(self.C),
        }


def branch_step_candidates(profile: PolynomialValuationProfile, v_prev) -> list[Fraction]:
    """Possible valuations of a_n given v(a_{n-1}) = v_prev, in decreasing order.

    These are the negated slopes of the lower hull of (0, v_prev) together
    with the coefficient points (i, v(P_i)); the constant coefficient of
    P(x) - a_{n-1} is -a_{n-1} exactly, so no cancellation can occur and the
    candidate list is exact.
    """
    if isinstance(v_prev, ExtendedRational) and v_prev.is_infinite:
        raise BranchDataError(
            "previous valuation is infinite (zero base point); "
            "use zero_departure_candidates for the step leaving zero"
        )
    v_prev = ensure_fraction(v_prev)
    points = [(0, v_prev)]
    points.extend((i, v) for i, v in profile.coeff_valuations.items())
    hull = lower_hull(points)
    return hull.root_valuations()


def zero_departure_candidates(profile: PolynomialValuationProfile) -> list[Fraction]:
    """Valuations of the nonzero preimages of zero, in decreasing order."""
    points = list(profile.coeff_valuations.items())
    if len(points) < 2:
        raise BranchDataError(
            "every preimage of zero is zero for this profile; the branch never leaves zero"
        )
    hull = lower_hull(points)
    return hull.root_valuations()


def _step_candidates(profile, v_prev: ExtendedRational):
    if v_prev.is_infinite:
        return zero_departure_candidates(profile)
    return branch_step_candidates(profile, v_prev)


def minimal_d_estimate(v, e_ke: int) -> int:
    """d under the minimal-ramification heuristic.

    With v(E) = Z, a level of valuation v = a/b forces the level's
    ramification index over E to be a multiple of both b and e_ke; assuming
    it equals lcm(b, e_ke) gives d = v * lcm(b, e_ke), an integer.
    """
    v = ensure_fraction(v)
    e = math.lcm(v.denominator, e_ke)
    d = v * e
    assert d.denominator == 1
    return d.numerator


def build_record(
    profile: PolynomialValuationProfile, valuations: Sequence
) -> BranchValuationRecord:
    """Validate raw branch valuations and assemble a BranchValuationRecord.

    Rejects: empty input, infinite entries after a finite one, zero or
    mixed-sign finite entries, and consecutive pairs where the later value
    is not a root valuation of P(x) minus the earlier level.
    """
    vals = tuple(as_extended(v) for v in valuations)
    if not vals:
        raise BranchDataError("branch valuations must be nonempty")
    seen_finite = False
    sign = 0
    for n, v in enumerate(vals):
        if v.is_infinite:
            if seen_finite:
                raise BranchDataError(
                    f"valuations[{n}] is infinite after a finite entry "
                    "(a branch cannot return to zero)"
                )
            continue
        f = v.finite()
        if f == 0:
            raise BranchDataError(f"valuations[{n}] is zero; base points of valuation 0 are not supported")
        if not seen_finite:
            sign = 1 if f > 0 else -1
            seen_finite = True
        elif (1 if f > 0 else -1) != sign:
            raise BranchDataError(
                f"valuations[{n}] = {v} has the opposite sign of the first nonzero valuation"
            )
    for n in range(len(vals) - 1):
        prev, nxt = vals[n], vals[n + 1]
        if nxt.is_infinite:
            continue
        candidates = _step_candidates(profile, prev)
        if nxt.finite() not in candidates:
            raise BranchDataError(
                f"valuations[{n + 1}] = {nxt} is not a root valuation at step {n}; "
                f"the polygon allows {[str(c) for c in candidates]}"
            )
    d_estimates = tuple(
        None if v.is_infinite else minimal_d_estimate(v, profile.e_ke) for v in vals
    )
    record = BranchValuationRecord(
        valuations=vals,
        d_estimates=d_estimates,
        stable_index=None,
        C=None,
        q=profile.q,
        p=profile.p,
        e_ke=profile.e_ke,
    )
    return replace(record, stable_index=find_stable_index(profile, record))


def predict_branch(
    profile: PolynomialValuationProfile,
    v_alpha0,
    choices: Sequence[int] = (),
    depth: int = 1,
) -> BranchValuationRecord:
    """Extend a base valuation through ``depth`` steps of the polygon dynamics.

    Steps with a single candidate are forced; at a step with several
    candidates the next entry of ``choices`` selects one (index into the
    decreasing candidate list) and an out-of-range or missing choice fails
    loudly.  Branches that stay at zero are not predicted; supply explicit
    leading "inf" entries instead.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    vals = [as_extended(v_alpha0)]
    queue = list(choices)
    for step in range(depth):
        candidates = _step_candidates(profile, vals[-1])
        if len(candidates) == 1:
            pick = candidates[0]
        else:
            if not queue:
                raise BranchDataError(
                    f"step {step} is ambiguous: candidates {[str(c) for c in candidates]}; "
                    "supply a slope choice"
                )
            idx = queue.pop(0)
            if not 0 <= idx < len(candidates):
                raise BranchDataError(
                    f"slope choice {idx} out of range at step {step}: "
                    f"{len(candidates)} candidates"
                )
            pick = candidates[idx]
        vals.append(ExtendedRational(pick))
    if queue:
        log.warning("unused slope choices: %s", queue)
    return build_record(profile, vals)


def extend_record(
    profile: PolynomialValuationProfile,
    record: BranchValuationRecord,
    min_length: int,
    max_steps: int = 512,
) -> BranchValuationRecord:
    """Extend a record through forced steps until it has ``min_length`` entries.

    Raises if an ambiguous step is reached first: that step reflects
    arithmetic beyond valuation data and must come from the caller.
    """
    vals = list(record.valuations)
    steps = 0
    while len(vals) < min_length:
        if steps >= max_steps:
            raise BranchDataError(f"extension exceeded {max_steps} steps")
        candidates = _step_candidates(profile, vals[-1])
        if len(candidates) != 1:
            raise BranchDataError(
                f"cannot extend: step {len(vals) - 1} has {len(candidates)} candidate "
                f"valuations {[str(c) for c in candidates]}; supply more branch data"
            )
        vals.append(ExtendedRational(candidates[0]))
        steps += 1
    if steps == 0:
        return record
    log.info("extended branch record by %d forced steps to length %d", steps, len(vals))
    extended = build_record(profile, vals)
    return replace(extended, C=record.C)


def semistable_a_bound(v_alpha0) -> int:
    """An index by which the halving/decrement estimate forces |v| below 1.

    For a positive base valuation the valuation drops by at least 1 or
    halves at every step, so ceil(v) steps suffice.
    """
    v = ensure_fraction(v_alpha0)
    if v <= 0:
        raise ValueError(f"bound defined for positive base valuations, got {v}")
    return math.ceil(v)


def estimate_d(record: BranchValuationRecord) -> Tuple[int, bool]:
    """Heuristic limiting d: the last minimal-ramification estimate.

    Trusted only when the base point is a uniformizer of the ground field
    (v(a_0) * e_ke = 1), where every level is Eisenstein and d = 1;
    otherwise the value is advisory and certificates that depend on it are
    marked conditional.
    """
    finite_estimates = [d for d in record.d_estimates if d is not None]
    if not finite_estimates:
        raise BranchDataError("record has no finite valuations to estimate d from")
    first = record.valuations[0]
    if first.is_finite and first.finite() * record.e_ke == 1:
        return 1, True
    return finite_estimates[-1], False


def find_stable_index(
    profile: PolynomialValuationProfile, record: BranchValuationRecord
) -> Optional[int]:
    """First recorded level passing the effective stability screen.

    Screens for: 0 < |v| <= 1/q^2, the minimal-ramification d-estimate
    prime to p, and v below every finite non-leading coefficient valuation.
    "Prime to p" is interpreted on the numerator of the d-estimate; the
    interpretation is recorded in every emitted certificate.
    """
    q = profile.q
    threshold = Fraction(1, q * q)
    floor = profile.min_nonleading_valuation()
    for n, v in enumerate(record.valuations):
        if v.is_infinite:
            continue
        f = v.finite()
        if not 0 < abs(f) <= threshold:
            continue
        d_n = record.d_estimates[n]
        if d_n is None or abs(d_n) % profile.p == 0:
            continue
        if not ExtendedRational(f) < floor:
            continue
        return n
    return None

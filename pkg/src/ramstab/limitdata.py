"""Limiting ramification data (V, R, M, E) and the error coefficient C.

For every sufficiently deep level n the Newton polygon of the shifted
iterate has the same V vertices, located at (p^{r_i}, m_i + e_i*C/q^n).
The main terms and error factors are computed from exact minima over the
coefficient valuations; which index achieves a tied minimum is decided by
the sign of the base valuation (first index when positive, last when
negative) and is not configurable.

The surrogate hull used to select the vertices places each point at
height M + E/q^2; any larger power of q would select the same vertices,
and the test suite cross-checks the surrogate against exact level
polygons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Tuple

from .branches import (
    BranchDataError,
    BranchValuationRecord,
    PolynomialValuationProfile,
    build_record,
    extend_record,
)
from .polygons import NewtonPolygon, lower_hull
from .valuations import INFINITY, binom_valuation, format_rational

__all__ = [
    "LimitingRamificationData",
    "main_and_error",
    "limiting_data",
    "compute_C",
    "level_polygon",
    "limiting_data_for_branch",
    "reindexed_record",
]


@dataclass(frozen=True)
class LimitingRamificationData:
    """Vertex data shared by all stable-regime polygons of one branch.

    V vertices sit over p^{r_1} < ... < p^{r_V} with heights
    m_i + e_i*C/q^n; always r_1 = 0, r_V = r and m_V = e_V = 0.
    C is branch-dependent and may be absent.
    """

    V: int
    R: Tuple[int, ...]
    M: Tuple[int, ...]
    E: Tuple[int, ...]
    sign: int
    C: Optional[Fraction] = None

    def __post_init__(self):
        if self.V != len(self.R) or self.V != len(self.M) or self.V != len(self.E):
            raise ValueError("R, M, E must each have V entries")
        if self.V < 2:
            raise ValueError("limiting data has at least the vertices over 1 and q")
        if self.R[0] != 0:
            raise ValueError("the first vertex exponent must be 0")
        if any(b <= a for a, b in zip(self.R, self.R[1:])):
            raise ValueError("vertex exponents must be strictly increasing")
        if self.M[-1] != 0 or self.E[-1] != 0:
            raise ValueError("the last vertex is (q, 0): m_V = e_V = 0")
        if any(m < 0 for m in self.M) or any(e < 0 for e in self.E):
            raise ValueError("main terms and error factors are nonnegative")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def to_json(self) -> dict:
        return {
            "V": self.V,
            "R": list(self.R),
            "M": list(self.M),
            "E": list(self.E),
            "C": None if self.C is None else format_rational(self.C),
            "sign": self.sign,
        }


def main_and_error(
    profile: PolynomialValuationProfile, k: int, sign: int
) -> Tuple[int, int]:
    """Main term and error factor of the candidate vertex over p^k.

    M_{p^k} is the minimum over p^k <= j <= q of v(C(j, p^k)) + v(P_j);
    E_{p^k} is j* - p^k for the first (sign +1) or last (sign -1) index j*
    achieving that minimum.  These tie rules are exactly the ones that
    minimize the exact heights once the vanishing error terms are restored.
    """
    if not 0 <= k <= profile.r:
        raise ValueError(f"k must lie in 0..{profile.r}, got {k}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    pk = profile.p**k
    best = INFINITY
    best_j = None
    for j in range(pk, profile.q + 1):
        term = binom_valuation(j, pk, profile.p, profile.v_p) + profile.coefficient_valuation(j)
        if term < best or (sign < 0 and term == best):
            best = term
            best_j = j
    assert best.is_finite and best_j is not None  # j = q always contributes 0 + 0
    main = best.finite()
    assert main.denominator == 1
    return int(main), best_j - pk


def limiting_data(
    profile: PolynomialValuationProfile, sign: int
) -> LimitingRamificationData:
    """Select the stable vertex set from the surrogate hull of (p^k, M + sign*E/q^2).

    The surrogate error term carries the sign of the base valuation: the
    exact level-n heights are M + E*C/q^n and C shares that sign, so when
    main terms are collinear the error must push the candidate vertex the
    same way it does in the exact polygons.
    """
    q = profile.q
    table = {k: main_and_error(profile, k, sign) for k in range(profile.r + 1)}
    points = [
        (profile.p**k, Fraction(m) + sign * Fraction(e, q * q))
        for k, (m, e) in table.items()
    ]
    hull = lower_hull(points)
    exponents = {profile.p**k: k for k in range(profile.r + 1)}
    R = tuple(exponents[x] for x, _ in hull.vertices)
    M = tuple(table[k][0] for k in R)
    E = tuple(table[k][1] for k in R)
    assert all(e <= q - 1 for e in E)
    return LimitingRamificationData(V=len(R), R=R, M=M, E=E, sign=sign)


def compute_C(
    profile: PolynomialValuationProfile,
    record: BranchValuationRecord,
    leading_zeros: Optional[int] = None,
) -> Fraction:
    """The error coefficient C = q^N v(a_N) at a level N where halving has set in.

    N = 0 for negative base valuations; N = ceil(v(a_0)) for positive ones
    (the ceiling extends the integer rule conservatively); and
    N = (number of leading zeros) + (largest coefficient valuation) for
    branches based at zero.
    """
    k = record.leading_zeros
    if leading_zeros is not None and leading_zeros != k:
        raise BranchDataError(
            f"leading_zeros={leading_zeros} disagrees with the record ({k} infinite entries)"
        )
    v0 = record.valuations[0]
    if v0.is_infinite:
        N = k + profile.max_coefficient_valuation()
    else:
        f0 = v0.finite()
        N = 0 if f0 < 0 else math.ceil(f0)
    if len(record.valuations) <= N:
        raise BranchDataError(
            f"record has {len(record.valuations)} valuations but C needs level {N}"
        )
    vN = record.valuations[N]
    if vN.is_infinite:
        raise BranchDataError(f"valuation at level {N} is infinite; C undefined")
    return profile.q**N * vN.finite()


def level_polygon(
    profile: PolynomialValuationProfile, data: LimitingRamificationData, n: int
) -> NewtonPolygon:
    """The exact level-n polygon: vertices (p^{r_i}, m_i + e_i*C/q^n).

    Valid in the stable regime; if the stated points are not strictly
    convex the level is not stable and construction fails loudly.
    """
    if data.C is None:
        raise ValueError("limiting data has no error coefficient C")
    if n < 0:
        raise ValueError("level must be nonnegative")
    q = profile.q
    error = Fraction(data.C, q**n)
    points = [
        (profile.p**r_i, Fraction(m_i) + e_i * error)
        for r_i, m_i, e_i in zip(data.R, data.M, data.E)
    ]
    try:
        polygon = NewtonPolygon(tuple(points))
    except ValueError as exc:
        raise ValueError(f"level {n} is not in the stable regime: {exc}") from exc
    return polygon


def limiting_data_for_branch(
    profile: PolynomialValuationProfile, record: BranchValuationRecord
) -> Tuple[LimitingRamificationData, BranchValuationRecord, int]:
    """Full pipeline: extend the record as needed, compute (V, R, M, E) and C.

    Returns the data with C attached, the (possibly extended) record with C
    and stable index filled in, and the level N used to read off C.
    """
    v0 = record.valuations[0]
    if v0.is_infinite:
        N = record.leading_zeros + profile.max_coefficient_valuation()
    else:
        f0 = v0.finite()
        N = 0 if f0 < 0 else math.ceil(f0)
    record = extend_record(profile, record, N + 1)
    C = compute_C(profile, record)
    # past N the valuation divides by q each step; walk until the stable
    # threshold 1/q^2 is crossed so the screen has a level to find
    t = abs(record.valuations[N].finite())
    threshold = Fraction(1, profile.q**2)
    extra = 0
    while t > threshold:
        t /= profile.q
        extra += 1
    record = extend_record(profile, record, N + extra + 2)
    record = replace(record, C=C)
    data = replace(limiting_data(profile, record.sign), C=C)
    return data, record, N


def reindexed_record(
    profile: PolynomialValuationProfile, record: BranchValuationRecord, N: int
) -> BranchValuationRecord:
    """The branch re-based at level N, with C recomputed from the tail.

    C is branch-relative, so after replacing the ground field by the level-N
    field it is recomputed from the tail valuations rather than rescaled.
    """
    if not 0 <= N < len(record.valuations):
        raise BranchDataError(f"reindex level {N} outside the recorded range")
    tail = build_record(profile, record.valuations[N:])
    _, tail, _ = limiting_data_for_branch(profile, tail)
    return tail

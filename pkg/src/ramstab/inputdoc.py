"""Input documents: parsing, validation and round-trip serialization.

An input document bundles a coefficient-valuation profile with recorded
branch data.  All rationals travel as strings ("a/b", "a", or "inf");
every parse failure names the offending field.  The JSON schema shipped
at schema/input.schema.json mirrors these rules for external tooling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .branches import (
    BranchDataError,
    BranchValuationRecord,
    PolynomialValuationProfile,
    build_record,
)
from .valuations import ExtendedRational, format_rational, parse_rational

__all__ = ["InputDocument", "InputError", "parse_document", "load_document"]


class InputError(ValueError):
    """Invalid input document; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class InputDocument:
    """Validated input: profile numbers plus the recorded branch valuations."""

    p: int
    r: int
    v_p: int
    e_ke: int
    coeff_valuations: Tuple[Tuple[int, Optional[int]], ...]
    base_valuation: ExtendedRational
    branch_valuations: Tuple[ExtendedRational, ...]
    d: Optional[int] = None
    leading_zeros: int = 0

    def to_json(self) -> dict:
        out = {
            "p": self.p,
            "r": self.r,
            "v_p": self.v_p,
            "e_ke": self.e_ke,
            "coeff_valuations": {
                str(i): ("inf" if v is None else str(v)) for i, v in self.coeff_valuations
            },
            "base_valuation": format_rational(self.base_valuation),
            "branch_valuations": [format_rational(v) for v in self.branch_valuations],
        }
        if self.d is not None:
            out["d"] = self.d
        if self.leading_zeros:
            out["leading_zeros"] = self.leading_zeros
        return out

    def profile(self) -> PolynomialValuationProfile:
        coeffs = {i: v for i, v in self.coeff_valuations if v is not None}
        return PolynomialValuationProfile(
            p=self.p, r=self.r, v_p=self.v_p, coeff_valuations=coeffs, e_ke=self.e_ke
        )

    def record(self) -> BranchValuationRecord:
        return build_record(self.profile(), self.branch_valuations)


def _require_int(obj, field, minimum=None):
    value = obj.get(field)
    if not isinstance(value, int) or isinstance(value, bool):
        raise InputError(field, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise InputError(field, f"must be >= {minimum}, got {value}")
    return value


def _parse_valuation_string(field, raw) -> ExtendedRational:
    if not isinstance(raw, str):
        raise InputError(field, f"expected a rational string, got {raw!r}")
    try:
        return parse_rational(raw)
    except ValueError as exc:
        raise InputError(field, str(exc)) from exc


def parse_document(obj) -> InputDocument:
    """Validate a decoded JSON object into an InputDocument.

    Every constraint violation is reported against the field that breaks
    it, including the cross-field ones (branch head versus base valuation,
    declared leading zeros versus infinite entries, coefficient bounds).
    """
    if not isinstance(obj, dict):
        raise InputError("$", f"expected a JSON object, got {type(obj).__name__}")
    known = {
        "p", "r", "v_p", "e_ke", "coeff_valuations",
        "base_valuation", "branch_valuations", "d", "leading_zeros",
    }
    for key in obj:
        if key not in known:
            raise InputError(key, "unknown field")
    p = _require_int(obj, "p", minimum=2)
    if any(p % d == 0 for d in range(2, p) if d * d <= p):
        raise InputError("p", f"{p} is not prime")
    r = _require_int(obj, "r", minimum=1)
    v_p = _require_int(obj, "v_p", minimum=1)
    e_ke = _require_int(obj, "e_ke", minimum=1) if "e_ke" in obj else 1
    q = p**r

    raw_coeffs = obj.get("coeff_valuations")
    if not isinstance(raw_coeffs, dict):
        raise InputError("coeff_valuations", "expected an object of index -> valuation")
    coeffs = []
    for key, raw in sorted(raw_coeffs.items(), key=lambda kv: int(kv[0]) if str(kv[0]).isdigit() else -1):
        field = f"coeff_valuations[{key}]"
        if not str(key).isdigit():
            raise InputError(field, "index must be a nonnegative integer string")
        i = int(key)
        if not 1 <= i <= q:
            raise InputError(field, f"index outside 1..{q}")
        if isinstance(raw, int) and not isinstance(raw, bool):
            value = ExtendedRational(raw)
        else:
            value = _parse_valuation_string(field, raw)
        if value.is_infinite:
            coeffs.append((i, None))  # explicit zero coefficient
            continue
        f = value.finite()
        if f.denominator != 1 or f < 0:
            raise InputError(field, f"valuations of coefficients are nonnegative integers, got {raw!r}")
        coeffs.append((i, int(f)))

    base = _parse_valuation_string("base_valuation", obj.get("base_valuation"))

    raw_branch = obj.get("branch_valuations")
    if not isinstance(raw_branch, list) or not raw_branch:
        raise InputError("branch_valuations", "expected a nonempty array of rational strings")
    branch = tuple(
        _parse_valuation_string(f"branch_valuations[{n}]", raw)
        for n, raw in enumerate(raw_branch)
    )
    if branch[0] != base:
        raise InputError(
            "branch_valuations[0]",
            f"head {format_rational(branch[0])} disagrees with base_valuation "
            f"{format_rational(base)}",
        )

    d = None
    if "d" in obj and obj["d"] is not None:
        d = _require_int(obj, "d")
        if d == 0:
            raise InputError("d", "d is a nonzero integer")

    infinite_prefix = 0
    for v in branch:
        if not v.is_infinite:
            break
        infinite_prefix += 1
    leading_zeros = infinite_prefix
    if "leading_zeros" in obj and obj["leading_zeros"] is not None:
        leading_zeros = _require_int(obj, "leading_zeros", minimum=0)
        if leading_zeros != infinite_prefix:
            raise InputError(
                "leading_zeros",
                f"declared {leading_zeros} but branch_valuations starts with "
                f"{infinite_prefix} infinite entries",
            )

    doc = InputDocument(
        p=p, r=r, v_p=v_p, e_ke=e_ke,
        coeff_valuations=tuple(coeffs),
        base_valuation=base,
        branch_valuations=branch,
        d=d,
        leading_zeros=leading_zeros,
    )
    # surface profile/record invariant violations with their field names
    try:
        profile = doc.profile()
    except ValueError as exc:
        raise InputError("coeff_valuations", str(exc)) from exc
    try:
        build_record(profile, branch)
    except BranchDataError as exc:
        raise InputError("branch_valuations", str(exc)) from exc
    return doc


def load_document(path) -> InputDocument:
    """Read and validate an input document from a JSON file."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("$", f"not valid JSON: {exc}") from exc
    return parse_document(obj)

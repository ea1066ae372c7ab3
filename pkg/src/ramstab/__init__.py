"""Exact ramification data for branch extensions of local fields.

Given the coefficient valuations of a monic polynomial congruent to x^q
modulo the maximal ideal and the valuations along a branch of backward
iterates, this package computes the limiting vertex data of the level
polygons, certifies tame ramification stability with machine-checkable
inequalities, and builds the exact piecewise-linear transition functions,
ramification breaks and elementary-subfield table of the tower.  All
arithmetic is exact rational.
"""

from .valuations import (
    ExtendedRational,
    INFINITY,
    binom_valuation,
    format_rational,
    kummer_carries,
    parse_rational,
)
from .polygons import NewtonPolygon, below_line, copolygon, lower_hull, slopes
from .plf import PLFunction, affine_transform, altitude, compose, evaluate, identity_plf, make_plf
from .branches import (
    BranchDataError,
    BranchValuationRecord,
    PolynomialValuationProfile,
    branch_step_candidates,
    build_record,
    estimate_d,
    extend_record,
    find_stable_index,
    predict_branch,
    semistable_a_bound,
)
from .limitdata import (
    LimitingRamificationData,
    compute_C,
    level_polygon,
    limiting_data,
    limiting_data_for_branch,
    main_and_error,
    reindexed_record,
)
from .certificates import (
    CertificateCheck,
    StabilityCertificate,
    certify,
    composition_criterion,
    pcb_normal_form,
    pcb_sufficient,
    revalidate,
)
from .hasseherbrand import (
    TowerFunction,
    TowerInvariantError,
    TransitionFunction,
    breaks_and_subfields,
    build_phi,
    build_tower,
)
from .inputdoc import InputDocument, InputError, load_document, parse_document

__version__ = "0.1.0"

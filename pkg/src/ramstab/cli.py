"""Command-line interface.

Commands: limit-data, branch, certify, hh, breaks, plot, selftest.
Exit codes: 0 success, 1 not-certified or tower invariant abort, 2
malformed input.  Logging verbosity comes from the RAMSTAB_LOG
environment variable (error/warn/info/debug); there are no logging flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .branches import BranchDataError, estimate_d
from .certificates import certify, pcb_normal_form, pcb_sufficient
from .hasseherbrand import (
    TowerInvariantError,
    breaks_and_subfields,
    build_phi,
    build_tower,
)
from .inputdoc import InputError, load_document
from .limitdata import (
    level_polygon,
    limiting_data_for_branch,
    reindexed_record,
)
from .polygons import copolygon
from .svgplot import render_level_report
from .valuations import format_rational

log = logging.getLogger(__name__)

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

REPORT_NOTES = [
    "non-integer positive base valuations use the ceiling rule for the halving bound",
    "d estimates assume minimal ramification at each level and are advisory",
]


def _configure_logging():
    name = os.environ.get("RAMSTAB_LOG", "warn").lower()
    logging.basicConfig(level=_LOG_LEVELS.get(name, logging.WARNING))


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _pipeline(path):
    doc = load_document(path)
    profile = doc.profile()
    record = doc.record()
    data, record, level_for_C = limiting_data_for_branch(profile, record)
    return doc, profile, record, data, level_for_C


def _limit_data_payload(path) -> dict:
    _doc, _profile, record, data, level_for_C = _pipeline(path)
    payload = data.to_json()
    payload["N"] = level_for_C
    payload["notes"] = REPORT_NOTES
    return payload


def _cmd_limit_data(args) -> int:
    _emit(_limit_data_payload(args.input), args.out)
    return 0


def _cmd_branch(args) -> int:
    doc, _profile, record, _data, level_for_C = _pipeline(args.input)
    d_est, trusted = estimate_d(record)
    payload = record.to_json()
    payload.update(
        {
            "sign": record.sign,
            "N": level_for_C,
            "d": doc.d,
            "d_heuristic": d_est,
            "d_trusted": True if doc.d is not None else trusted,
            "notes": REPORT_NOTES,
        }
    )
    _emit(payload, args.out)
    return 0


def _certify_payload(path) -> tuple[dict, int]:
    doc, profile, record, _data, _n = _pipeline(path)
    cert = certify(profile, record, d=doc.d)
    normal_form, witness = pcb_normal_form(profile)
    base = record.first_finite()
    payload = cert.to_json()
    payload["diagnostics"] = {
        "bounded_critical_orbits_normal_form": normal_form,
        "normal_form_witness": witness,
        "small_base_valuation": None
        if base is None
        else pcb_sufficient(profile.p, profile.v_p, base),
    }
    return payload, 0 if cert.certified else 1


def _certify_one(path: str) -> tuple[str, int, str]:
    try:
        payload, code = _certify_payload(path)
        return path, code, json.dumps(payload, indent=2)
    except (InputError, BranchDataError) as exc:
        return path, 2, json.dumps({"error": str(exc)})


def _cmd_certify(args) -> int:
    if len(args.inputs) == 1 and args.jobs <= 1:
        payload, code = _certify_payload(args.inputs[0])
        _emit(payload, args.out)
        return code
    results = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_certify_one, args.inputs))
    else:
        results = [_certify_one(path) for path in args.inputs]
    worst = 0
    combined = {}
    for path, code, text in results:
        combined[path] = json.loads(text)
        worst = max(worst, code)
    _emit(combined, args.out)
    return worst


def _tower_payload(path, depth: int) -> tuple[dict, int]:
    doc, profile, record, data, _n = _pipeline(path)
    cert = certify(profile, record, d=doc.d)
    if not cert.certified:
        return {"certificate": cert.to_json()}, 1
    working = record if cert.reindex == 0 else reindexed_record(profile, record, cert.reindex)
    working_data = replace(data, C=working.C)
    v_base = working.first_finite()
    phis = [build_phi(profile, working_data, n, cert.d_used, v_base) for n in range(1, depth + 1)]
    tower = build_tower(profile, working_data, cert.d_used, v_base, depth)
    table = breaks_and_subfields(tower, working_data, reindex=cert.reindex)
    payload = {
        "depth": depth,
        "reindex": cert.reindex,
        "d": cert.d_used,
        "d_trusted": cert.d_trusted,
        "conditional_on_d": cert.conditional_on_d,
        "base_valuation": format_rational(v_base),
        "C": format_rational(working.C),
        "phi": [phi.to_json() for phi in phis],
        "Phi": [tf.to_json() for tf in tower],
        **table,
        "notes": REPORT_NOTES,
    }
    return payload, 0


def _cmd_hh(args) -> int:
    payload, code = _tower_payload(args.input, args.depth)
    _emit(payload, args.out)
    return code


def _cmd_breaks(args) -> int:
    payload, code = _tower_payload(args.input, args.depth)
    if code == 0:
        payload = {
            "depth": payload["depth"],
            "reindex": payload["reindex"],
            "breaks": payload["breaks"],
            "subfields": payload["subfields"],
            "break_scale": payload["break_scale"],
        }
    _emit(payload, args.out)
    return code


def _cmd_plot(args) -> int:
    doc, profile, record, data, _n = _pipeline(args.input)
    cert = certify(profile, record, d=doc.d)
    if not cert.certified:
        _emit({"certificate": cert.to_json()}, None)
        return 1
    working = record if cert.reindex == 0 else reindexed_record(profile, record, cert.reindex)
    working_data = replace(data, C=working.C)
    v_base = working.first_finite()
    polygon = level_polygon(profile, working_data, args.depth)
    phi = build_phi(profile, working_data, args.depth, cert.d_used, v_base)
    tower = build_tower(profile, working_data, cert.d_used, v_base, args.depth)
    svg = render_level_report(polygon, copolygon(polygon), phi.plf, tower[-1].plf, args.depth)
    Path(args.out).write_text(svg)
    log.info("wrote %s", args.out)
    return 0


def _bundled(name: str) -> Path:
    return Path(str(resources.files("ramstab").joinpath("data", name)))


def _cmd_selftest(args) -> int:
    failures = 0
    cases = [
        ("sample.limit-data", lambda p: _limit_data_payload(p), "sample.json"),
        ("sample.certify", lambda p: _certify_payload(p)[0], "sample.json"),
        ("sample.hh3", lambda p: _tower_payload(p, 3)[0], "sample.json"),
        ("uniformizer.limit-data", lambda p: _limit_data_payload(p), "uniformizer.json"),
        ("uniformizer.certify", lambda p: _certify_payload(p)[0], "uniformizer.json"),
        ("uniformizer.hh5", lambda p: _tower_payload(p, 5)[0], "uniformizer.json"),
    ]
    for name, run, fixture in cases:
        golden_path = _bundled(os.path.join("golden", name + ".json"))
        expected = json.loads(golden_path.read_text())
        actual = run(_bundled(fixture))
        if actual == expected:
            print(f"selftest {name}: OK")
        else:
            failures += 1
            print(f"selftest {name}: MISMATCH")
            print(json.dumps({"expected": expected, "actual": actual}, indent=2))
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramstab",
        description="Exact ramification data, stability certificates and "
        "transition functions for branch extensions of local fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limit-data", help="limiting vertex data and error coefficient")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_limit_data)

    p = sub.add_parser("branch", help="validated and extended branch record")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_branch)

    p = sub.add_parser("certify", help="stability certificate (exit 1 if not certified)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("hh", help="transition functions and tower to a depth")
    p.add_argument("input")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_hh)

    p = sub.add_parser("breaks", help="ramification breaks and subfield table")
    p.add_argument("input")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_breaks)

    p = sub.add_parser("plot", help="render polygon, dual and transition functions as SVG")
    p.add_argument("input")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("selftest", help="run the bundled fixtures against golden reports")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}), file=sys.stderr)
        return 2
    except BranchDataError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except TowerInvariantError as exc:
        print(json.dumps({"error": str(exc), "invariant": exc.prop}), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

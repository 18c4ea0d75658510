"""Command-line front-end: analysis verbs over catalog or file inputs.

Exit codes: 0 for any verdict obtained (negative verdicts included), 2 when
the engine cannot decide (Inconclusive), 1 for structural errors or bad
input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .maps import RuleInjection, StructuralError
from .branching import (
    BranchingSystem, coding, core_set, is_pure, orbit_structure,
    point_spectrum, validate_branching, char_poly_string,
)
from .extension import (
    Q2System, build_tau, count_extensions, extendible, verify_q2,
)
from .classify import (
    classify_component, o2_components, q2_components, q2_decomposable,
    regularity_verdict,
)
from .endo import ENDO_TABLE, check_candidate_U, endo_table_report
from .states import Phase, hypothesis_flag, omega_z, omega_z_consistency
from .catalog import CATALOG_NAMES, catalog

SCHEMA = "q2perm/1"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _load_input(args):
    if args.catalog:
        item = catalog(args.catalog)
        return item.kind, item.system
    if args.input:
        with open(args.input) as fh:
            data = json.load(fh)
        if "tau" in data:
            tau = data["tau"]
            if tau.get("kind") == "table":
                raise StructuralError("table-form tau files cannot be reloaded")
            return "q2", Q2System(RuleInjection.from_json(data["sigma2"]),
                                  RuleInjection.from_json(tau))
        return "branching", BranchingSystem.from_json(data)
    raise StructuralError("provide --catalog NAME or --input FILE")


def _branching_of(kind, system) -> BranchingSystem:
    return system.restriction() if kind == "q2" else system


def _emit(args, payload: dict, code: int) -> int:
    payload["schema"] = SCHEMA
    if args.format == "json":
        print(json.dumps(payload, indent=2, default=str))
    else:
        _print_text(payload)
    return code


def _print_text(payload, indent=0):
    pad = "  " * indent
    for key, value in payload.items():
        if key == "schema":
            continue
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _print_text(value, indent + 1)
        elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
            print(f"{pad}{key}:")
            for item in value:
                _print_text(item, indent + 1)
                print()
        else:
            print(f"{pad}{key}: {value}")


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def _cmd_validate(args):
    kind, system = _load_input(args)
    if kind == "q2":
        report = verify_q2(system, window=args.window)
        payload = {"kind": "q2", "passed": report.passed, "exact": report.exact,
                   "checks": [{"name": n, "ok": ok, "witness": w}
                              for n, ok, w in report.checks]}
        return _emit(args, payload, EXIT_OK if report.passed else EXIT_OK)
    report = validate_branching(system)
    payload = {"kind": "branching", "ok": report.ok, "total": report.total,
               "injective": report.injective, "errors": report.errors,
               "collisions": [str(c) for c in report.collisions[:4]]}
    return _emit(args, payload, EXIT_OK if report.ok else EXIT_ERROR)


def _cmd_analyze(args):
    kind, system = _load_input(args)
    sys_b = _branching_of(kind, system)
    payload = {"system": repr(sys_b)}
    for name, sigma in (("sigma1", sys_b.sigma1), ("sigma2", sys_b.sigma2)):
        core = core_set(sigma)
        entry = {"core_complete": core.complete,
                 "core_members": sorted(core.members, key=repr),
                 "cycles": [list(c) for c in core.cycles],
                 "certificate": core.certificate}
        pure, _ = is_pure(sigma)
        entry["pure"] = pure
        if core.complete:
            spec = point_spectrum(sigma, core)
            entry["point_spectrum"] = [
                {"roots_of_unity_order": n, "multiplicity": m}
                for n, m in spec.groups]
            if core.members:
                entry["char_poly"] = char_poly_string(
                    sorted(len(c) for c in core.cycles))
        payload[name] = entry
    inconclusive = any(payload[s]["pure"] is None for s in ("sigma1", "sigma2"))
    return _emit(args, payload, EXIT_INCONCLUSIVE if inconclusive else EXIT_OK)


def _cmd_extend(args):
    kind, system = _load_input(args)
    sys_b = _branching_of(kind, system)
    ext = extendible(sys_b)
    payload = {"verdict": {True: "extendible", False: "not extendible",
                           None: "inconclusive"}[ext.verdict],
               "reason": ext.reason}
    if ext.verdict is None:
        return _emit(args, payload, EXIT_INCONCLUSIVE)
    if ext.verdict is False:
        return _emit(args, payload, EXIT_OK)
    payload["matchings"] = [
        [{"cycle1": list(ext.core1.cycles[i]), "cycle2": list(ext.core2.cycles[j]),
          "shift": s} for i, j, s in m.pairs]
        for m in ext.matchings]
    payload["count"] = repr(count_extensions(sys_b))
    q2 = build_tau(sys_b, ext.matchings[0])
    payload["tau"] = q2.to_json(window=args.window)["tau"]
    payload["tau_exact"] = q2.tau_is_exact()
    report = verify_q2(q2, window=args.window)
    payload["verification"] = {"passed": report.passed, "exact": report.exact,
                               "checks": [{"name": n, "ok": ok}
                                          for n, ok, _ in report.checks]}
    return _emit(args, payload, EXIT_OK)


def _make_q2(args, kind, system):
    if kind == "q2":
        return system
    ext = extendible(system)
    if not ext.verdict:
        raise StructuralError(
            f"system does not extend ({ext.reason}); nothing to classify at "
            f"the unitary level")
    return build_tau(system, ext.matchings[0])


def _cmd_decompose(args):
    kind, system = _load_input(args)
    sys_b = _branching_of(kind, system)
    o2 = o2_components(sys_b, window=args.window)
    payload = {"o2_components": {
        "count": len(o2), "note": o2.note,
        "components": [
            {"id": c.ident, "certified": c.certified,
             "class": repr(classify_component(o2, c, args.depth)),
             "sample": list(c.members_sample[:12])}
            for c in o2.components]}}
    code = EXIT_OK
    try:
        q2 = _make_q2(args, kind, system)
        parts = q2_components(q2, window=args.window)
        payload["q2_components"] = {
            "count": len(parts), "note": parts.note,
            "components": [
                {"id": c.ident, "tau_orbits": len(c.orbit_reps) or None,
                 "certified": c.certified,
                 "class": repr(classify_component(parts, c, args.depth)),
                 "sample": list(c.members_sample[:12])}
                for c in parts.components]}
        if any(not c.certified for c in parts.components):
            code = EXIT_INCONCLUSIVE
    except StructuralError as exc:
        payload["q2_components"] = {"error": str(exc)}
    return _emit(args, payload, code)


def _cmd_classify(args):
    kind, system = _load_input(args)
    sys_b = _branching_of(kind, system)
    payload = {"regularity": repr(regularity_verdict(sys_b, args.window, args.depth))}
    try:
        q2 = _make_q2(args, kind, system)
        report = q2_decomposable(q2, window=args.window, depth=args.depth)
        payload["decomposable"] = report.decomposable
        payload["classification"] = repr(report.aggregate)
        payload["components"] = [repr(c) for c in report.classes]
        code = EXIT_INCONCLUSIVE if report.decomposable is None else EXIT_OK
    except StructuralError as exc:
        payload["classification"] = f"no unitary level ({exc})"
        code = EXIT_OK
    return _emit(args, payload, code)


def _cmd_coding(args):
    kind, system = _load_input(args)
    sys_b = _branching_of(kind, system)
    prefix = coding(sys_b, args.index, depth=args.depth, budget=args.budget)
    payload = {"index": args.index, "digits": prefix.digits,
               "certified_tail": (
                   {"preperiod": prefix.certified_tail[0],
                    "period": prefix.certified_tail[1]}
                   if prefix.certified_tail else None)}
    code = EXIT_OK if prefix.certified_tail else EXIT_INCONCLUSIVE
    return _emit(args, payload, code)


def _cmd_endo_table(args):
    rows = [args.row] if args.row else None
    if rows and rows[0] not in ENDO_TABLE:
        raise StructuralError(f"unknown row {args.row!r}")
    entries = []
    for row in endo_table_report(rows):
        entry = {"row": row.name,
                 "rep_level_extendible": row.rep_extendible,
                 "asserted_extendible": row.paper_extendible,
                 "level": row.level, "agrees": row.agrees(),
                 "note": row.note}
        if row.candidate is not None:
            entry["candidate"] = {
                "relation tau.sigma2=sigma1": row.candidate.relation1,
                "relation sigma2.tau=tau.sigma1": row.candidate.relation2}
        if row.refutation is not None:
            entry["refuted_candidate"] = {
                "relation tau.sigma2=sigma1": row.refutation.relation1,
                "witness1": row.refutation.witness1,
                "relation sigma2.tau=tau.sigma1": row.refutation.relation2,
                "witness2": row.refutation.witness2}
        entries.append(entry)
    return _emit(args, {"rows": entries}, EXIT_OK)


def _parse_phase(text: str) -> Phase:
    if "/" in text:
        p, q = text.split("/")
        return Phase.rational(int(p), int(q))
    return Phase.unit(complex(text.replace("i", "j")))


def _cmd_state_eval(args):
    z = _parse_phase(args.z)
    payload = {"z": repr(z), "hypothesis_flag": hypothesis_flag(z, args.bound)}
    if args.consistency:
        report = omega_z_consistency(z, args.consistency, args.bound)
        payload["consistency"] = {
            "level_sums_ok": report.level_sums_ok,
            "projection_values_ok": report.projection_values_ok,
            "factor_nonvanishing": report.factor_nonvanishing,
            "details": report.details}
        return _emit(args, payload, EXIT_OK)
    value = omega_z(args.alpha or "", args.beta or "", args.upower, z,
                    override=args.override, bound=args.bound)
    payload["value"] = repr(value)
    payload["numeric"] = str(value.value)
    return _emit(args, payload, EXIT_OK)


def _cmd_catalog(args):
    item = catalog(args.name)
    payload = {"name": item.name, "kind": item.kind,
               "description": item.description}
    if item.kind == "q2":
        payload["system"] = item.system.to_json(window=args.window)
    elif hasattr(item.system.sigma1, "to_json"):
        payload["system"] = item.system.to_json()
    return _emit(args, payload, EXIT_OK)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--catalog", help="builtin system name "
                   f"(patterns: {', '.join(CATALOG_NAMES)})")
    p.add_argument("--input", help="JSON file with a system")
    p.add_argument("--window", type=int, default=10 ** 4,
                   help="index window for window-checked properties")
    p.add_argument("--depth", type=int, default=64, help="coding depth")
    p.add_argument("--budget", type=int, default=10 ** 6, help="walk budget")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized diagnostics")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="q2perm",
        description="Exact analysis of permutative representations given by "
                    "integer branching systems.")
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb, fn in [("validate", _cmd_validate), ("analyze", _cmd_analyze),
                     ("extend", _cmd_extend), ("decompose", _cmd_decompose),
                     ("classify", _cmd_classify)]:
        p = sub.add_parser(verb)
        _add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("coding")
    _add_common(p)
    p.add_argument("--index", type=int, required=True)
    p.set_defaults(fn=_cmd_coding)

    p = sub.add_parser("endo-table")
    _add_common(p)
    p.add_argument("--row", help="single table row, e.g. 23 or (12)(34)")
    p.set_defaults(fn=_cmd_endo_table)

    p = sub.add_parser("state-eval")
    _add_common(p)
    p.add_argument("--alpha", default="")
    p.add_argument("--beta", default="")
    p.add_argument("--upower", type=int, default=0)
    p.add_argument("--z", required=True, help="phase: p/q rotation or x+yi")
    p.add_argument("--bound", type=int, default=64)
    p.add_argument("--override", action="store_true",
                   help="evaluate despite a violated order hypothesis")
    p.add_argument("--consistency", type=int, default=0,
                   help="run the consistency identities up to this level")
    p.set_defaults(fn=_cmd_state_eval)

    p = sub.add_parser("catalog")
    _add_common(p)
    p.add_argument("name")
    p.set_defaults(fn=_cmd_catalog)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()

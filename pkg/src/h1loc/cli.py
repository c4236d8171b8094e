"""Command-line front end.

Subcommands: analyze a group-spec file, scan subgroup spaces, run the
verification suite, print the prime-bound constants.  Structured records
go to stdout (or --out); diagnostics and summaries go to stderr.  Exit
codes: 0 success, 1 usage or input error, 2 falsification event.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .ambient import DEFAULT_AMBIENT_BOUND
from .cohomology import Action, default_budget
from .errors import BudgetExceeded, FalsificationError, InputError
from .matgroup import DEFAULT_CLOSURE_CAP, semisimple_diagonal_lift, sylow_p, triangular_slices
from .scan import load_group_spec, record_to_json, run_scan
from .verifier import (
    constants,
    eigenvalue_case_verdict,
    hypothesis_report,
    local_vanishing_verdict,
    slice_vanishing_suite,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FALSIFIED = 2


def _emit(doc: dict, out) -> None:
    out.write(record_to_json(doc) + "\n")


def _apply_cli_mutations():
    # test hook shared with the verify suite; see suite._apply_mutations
    if os.environ.get("H1LOC_MUTATE"):
        from .suite import _apply_mutations

        _apply_mutations()


def cmd_analyze(args) -> int:
    group, label, cap = load_group_spec(args.spec)
    budget = args.budget if args.budget is not None else default_budget()
    report = hypothesis_report(group)
    doc = {
        "type": "analysis",
        "label": label,
        "p": group.modulus.p,
        "n": group.modulus.n,
        "hash": group.group_hash,
        "order": group.order,
        "generators": [[[g.a, g.b], [g.c, g.d]] for g in group.generators],
        "hypotheses": report.as_dict(),
    }
    try:
        syl = sylow_p(group)
        doc["sylow_order"] = syl.order
    except Exception as exc:
        doc["sylow_order"] = None
        doc["sylow_note"] = str(exc)
    lift = semisimple_diagonal_lift(group)
    if lift is not None:
        conj = lift.group
        slices = triangular_slices(conj)
        doc["diagonal_lift"] = {
            "matrix": [[lift.matrix.a, 0], [0, lift.matrix.d]],
            "order": lift.order,
            "gap_is_unit": lift.gap.is_unit(),
        }
        doc["slices"] = {
            "diag": slices.diag.order,
            "strict_upper": slices.strict_upper.order,
            "strict_lower": slices.strict_lower.order,
            "upper": slices.upper.order,
            "lower": slices.lower.order,
        }
    else:
        doc["diagonal_lift"] = None
    act = Action(group, budget=budget)
    try:
        doc["h1"] = list(act.h1().factors)
        doc["h1_loc"] = list(act.h1_loc().factors)
    except BudgetExceeded:
        doc["h1"] = None
        doc["h1_loc"] = None
        doc["budget_note"] = f"order {group.order} exceeds budget {budget}"
    verdicts = {}
    verdicts["local_vanishing"] = local_vanishing_verdict(group, budget=budget).as_dict()
    verdicts["eigenvalue_case"] = eigenvalue_case_verdict(group, budget=budget).as_dict()
    verdicts["slice_vanishing"] = slice_vanishing_suite(group, budget=budget)
    doc["verdicts"] = verdicts
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        _emit(doc, out)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_scan(args) -> int:
    records, summary = run_scan(
        p=args.p,
        n=args.n,
        mode=args.mode,
        count=args.count,
        seed=args.seed,
        budget=args.budget,
        cap=args.cap,
        bound=args.bound,
        require_full_det=args.require_full_det,
        jobs=args.jobs,
        timings=args.timings,
    )
    header = {
        "type": "header",
        "command": "scan",
        "p": args.p,
        "n": args.n,
        "mode": args.mode,
        "count": args.count,
        "seed": args.seed,
        "budget": args.budget if args.budget is not None else default_budget(),
        "cap": args.cap,
        "require_full_det": args.require_full_det,
    }
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        _emit(header, out)
        for rec in records:
            _emit(rec, out)
    finally:
        if args.out:
            out.close()
    _emit(summary, sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .suite import run_verify_suite

    rows = run_verify_suite(budget=args.suite_budget)
    width = max(len(r.key) for r in rows)
    failed = skipped = 0
    for row in rows:
        mark = {"pass": "PASS", "fail": "FAIL", "skip": "SKIP"}[row.status]
        print(f"{mark}  {row.key.ljust(width)}  {row.detail}")
        failed += row.status == "fail"
        skipped += row.status == "skip"
    print(f"-- {len(rows) - failed - skipped} passed, {failed} failed, {skipped} skipped")
    if failed:
        return EXIT_FALSIFIED if any(
            r.status == "fail" and "falsification" in r.detail for r in rows
        ) else EXIT_INPUT
    return EXIT_OK


def cmd_constants(args) -> int:
    table = constants(args.degree)
    _emit(table, sys.stdout)
    lines = [
        f"degree {table['degree']}",
        f"  isogeny primes: {table['isogeny_primes']}",
        f"  rational torsion primes: {table['rational_torsion_primes']}",
        f"  quadratic torsion primes: {table['quadratic_torsion_primes']}",
        f"  cyclotomic bound: {table['cyclotomic_bound']}",
        f"  constant: {table['constant'] if table['constant'] is not None else 'unavailable'}",
    ]
    print("\n".join(lines), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h1loc",
        description="Exact H^1 and local-condition cohomology for subgroups of GL2(Z/p^nZ)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="full report for one group-spec file")
    pa.add_argument("spec", help="path to a JSON group spec")
    pa.add_argument("--budget", type=int, default=None,
                    help="max group order for exact cohomology (env H1LOC_BUDGET)")
    pa.add_argument("--out", default=None, help="write the report to a file")
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("scan", help="scan subgroups of GL2(Z/p^nZ)")
    ps.add_argument("--p", type=int, required=True)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--mode", choices=("exhaustive", "sample"), required=True)
    ps.add_argument("--count", type=int, default=0, help="distinct groups in sample mode")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--budget", type=int, default=None)
    ps.add_argument("--cap", type=int, default=DEFAULT_CLOSURE_CAP)
    ps.add_argument("--bound", type=int, default=DEFAULT_AMBIENT_BOUND,
                    help="ambient size limit for exhaustive mode")
    ps.add_argument("--require-full-det", action="store_true",
                    help="keep only groups with surjective determinant")
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--timings", action="store_true",
                    help="include wall-clock times (breaks byte determinism)")
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_scan)

    pv = sub.add_parser("verify", help="run the full property suite")
    pv.add_argument("--budget", dest="suite_budget", type=int, default=1,
                    help="0 = cheap rows only, 1 = standard, 2 = acceptance scale")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("constants", help="prime bound table by field degree")
    pc.add_argument("--degree", type=int, required=True)
    pc.set_defaults(func=cmd_constants)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_cli_mutations()
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FalsificationError as exc:
        print(f"FALSIFICATION: {exc}", file=sys.stderr)
        print(json.dumps({"type": "falsification", "bundle": exc.bundle}), file=sys.stderr)
        return EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())

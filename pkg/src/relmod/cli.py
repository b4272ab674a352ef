"""Command line interface.

Reports go to stdout as JSON; diagnostics and timings go to stderr.
Exit codes: 0 success, 1 error or failed verification, 2 a ``±inf``
sentinel under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone

from .algebra import GROUP_TOL, HERMITIAN_TOL, SUPPORT_ETA
from .bench import bench, format_table
from .modular import DENSE_CAP, DenseCapExceeded
from .problem import ProblemError, dump_problem, parse_problem
from .report import REPORT_TYPES, TaskError, run_report
from .verify import parse_dims, verify_suite

EXIT_OK, EXIT_ERROR, EXIT_SENTINEL = 0, 1, 2


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--strict", action="store_true", help="exit 2 when any value is a +/-inf sentinel")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generated_at field")
    p.add_argument("--tol", type=float, default=HERMITIAN_TOL, help="Hermitian/positivity tolerance")
    p.add_argument("--group-tol", type=float, default=GROUP_TOL, help="eigenvalue grouping tolerance")
    p.add_argument("--support-eta", type=float, default=SUPPORT_ETA, help="relative support threshold")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="relmod",
        description="Relative modular operator, relative entropies and quasi-entropies "
        "on finite direct sums of matrix blocks with a weighted trace.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in REPORT_TYPES:
        sp = sub.add_parser(name, parents=[common], help=f"run the {name} tasks of a problem file")
        sp.add_argument("file")
    sp = sub.add_parser("report", parents=[common], help="run every entropy/quasi/renyi task")
    sp.add_argument("file")
    sp = sub.add_parser("canonical", parents=[common], help="print the canonical form of a problem file")
    sp.add_argument("file")

    sp = sub.add_parser("verify", parents=[common], help="seeded invariant suite")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--dims", default="2;3;2,2", help='block dims per shape, e.g. "2;3;2,2"')
    sp.add_argument("--trials", type=int, default=25)
    sp.add_argument("--dense-cap", type=int, default=DENSE_CAP)
    sp.add_argument("--only", default=None, help="run only checks whose name starts with this prefix")

    sp = sub.add_parser("bench", parents=[common], help="pairing vs dense construction timings")
    sp.add_argument("--dims", default="2;4;8;3,3")
    sp.add_argument("--reps", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dense-cap", type=int, default=DENSE_CAP)
    sp.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    return parser


def _tolerances(args) -> dict:
    return {"tol": args.tol, "group_tol": args.group_tol, "support_eta": args.support_eta}


def _emit(doc: dict, args):
    if not args.no_timestamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _load(args):
    return parse_problem(args.file, tol=args.tol, group_tol=args.group_tol, eta=args.support_eta)


def _cmd_report(args) -> int:
    problem = _load(args)
    types = REPORT_TYPES if args.command == "report" else (args.command,)
    if not any(t.type in types for t in problem.tasks):
        print(f"error: {args.file}: no {'/'.join(types)} tasks", file=sys.stderr)
        return EXIT_ERROR
    report, sentinel = run_report(
        problem, types, source=args.file, tolerances=_tolerances(args),
        timestamp=not args.no_timestamp,
    )
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    if sentinel:
        print("note: report contains +/-inf sentinels", file=sys.stderr)
        if args.strict:
            return EXIT_SENTINEL
    return EXIT_OK


def _cmd_canonical(args) -> int:
    sys.stdout.write(dump_problem(_load(args)))
    return EXIT_OK


def _cmd_verify(args) -> int:
    t0 = time.perf_counter()
    result = verify_suite(
        args.seed, parse_dims(args.dims), args.trials, dense_cap=args.dense_cap, only=args.only,
    )
    elapsed = time.perf_counter() - t0
    _emit({"command": "verify", "dims": args.dims, **result}, args)
    s = result["summary"]
    print(
        f"verify: {s['evaluations']} evaluations, {s['failed']} failed, "
        f"{s['skipped']} skipped in {elapsed:.2f} s",
        file=sys.stderr,
    )
    return EXIT_ERROR if s["failed"] else EXIT_OK


def _cmd_bench(args) -> int:
    result = bench(parse_dims(args.dims), args.reps, seed=args.seed, dense_cap=args.dense_cap)
    if args.json:
        for w in result["warnings"]:
            print(f"warning: {w}", file=sys.stderr)
        _emit({"command": "bench", "dims": args.dims, **result}, args)
    else:
        sys.stdout.write(format_table(result))
    return EXIT_OK if all(r["valid"] for r in result["rows"]) else EXIT_ERROR


COMMANDS = {
    "entropy": _cmd_report,
    "quasi": _cmd_report,
    "renyi": _cmd_report,
    "report": _cmd_report,
    "canonical": _cmd_canonical,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ProblemError, TaskError, DenseCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

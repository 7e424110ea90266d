"""Command line entry point: ``sparsedecomp {decompose,rip,recover,verify}``.

Exit status is 0 on success, 1 when a check fails or a verdict is
inconsistent, and 2 for usage or input errors.
"""
import argparse
import json
import logging
import sys

from .decomposition import decompose, verify_decomposition
from .errors import SparseDecompError
from .fileio import InputError, dumps, read_matrix, read_vector, write_json
from .harness import ExperimentConfig, check_report, verify_theorem31
from .recovery import recover
from .rip import rip_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(obj, out):
    if out:
        write_json(out, obj)
    else:
        print(dumps(obj))


def cmd_decompose(args):
    v = read_vector(args.input)
    d = decompose(v, args.k, args.capacity)
    _emit(d.to_dict(), args.out)
    report = verify_decomposition(d)
    if not report.passed:
        print(f"decomposition failed checks: {', '.join(report.failures())}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_rip(args):
    phi = read_matrix(args.matrix)
    report = rip_report(phi, args.k, args.kprime)
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def cmd_recover(args):
    phi = read_matrix(args.matrix)
    y = read_vector(args.y)
    if y.size != phi.shape[0]:
        raise InputError(f"{args.y}: length {y.size} does not match {phi.shape[0]} matrix rows")
    reference = read_vector(args.reference) if args.reference else None
    if reference is not None and reference.size != phi.shape[1]:
        raise InputError(f"{args.reference}: length {reference.size} does not match "
                         f"{phi.shape[1]} matrix columns")
    res = recover(phi, y, reference, args.tol)
    _emit(res.to_dict(), args.out)
    return EXIT_FAIL if res.exact is False else EXIT_OK


def cmd_verify(args):
    if args.check:
        try:
            with open(args.check) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{args.check}: {exc}") from None
        problems = check_report(data)
        for msg in problems:
            print(f"{args.check}: {msg}", file=sys.stderr)
        return EXIT_FAIL if problems else EXIT_OK
    if not args.config:
        raise InputError("verify needs --config (or --check REPORT)")
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{args.config}: {exc.strerror}") from None
    config = ExperimentConfig.from_dict(raw, where=str(args.config))
    verdict = verify_theorem31(config)
    data = verdict.to_dict()
    if args.report:
        write_json(args.report, data)
    summary = data["summary"]
    print(f"matrices: {summary['matrices']}, condition holds: {summary['condition_holds']}, "
          f"exact under condition: {summary['exact_under_condition']}/"
          f"{summary['signals_under_condition']}, consistent: {verdict.consistent}")
    return EXIT_OK if verdict.consistent else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="sparsedecomp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="convex k-sparse decomposition of a vector")
    p.add_argument("--input", required=True, help="JSON array of numbers")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--capacity", type=float, default=None)
    p.add_argument("--out", default=None, help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("rip", help="exact delta_k and theta_{k,k'}")
    p.add_argument("--matrix", required=True, help="CSV or JSON matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kprime", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rip)

    p = sub.add_parser("recover", help="basis pursuit by linear programming")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True, help="JSON measurement vector")
    p.add_argument("--reference", default=None, help="JSON reference signal")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify", help="run a seeded recovery experiment")
    p.add_argument("--config", default=None)
    p.add_argument("--report", default=None, help="write the JSON report here")
    p.add_argument("--check", default=None, metavar="REPORT",
                   help="re-check consistency of an existing report instead of running")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, SparseDecompError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success, 1 a mathematical property was found violated,
2 invalid input (bad flags, malformed files, matrices outside the cone).
"""

from __future__ import annotations

import argparse
import sys

from . import divergences, formats, harness, qubit
from .exceptions import NotEmbeddable, NumericalInconsistency, QJSDError, ValidationError
from .explore import MODES, explore
from .quadrature import QuadratureConfig, verify_representation

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "a") as fh:
            fh.write(text + "\n")
    else:
        print(text, flush=True)


def _cmd_compute(args):
    a = formats.load_matrix(args.a)
    b = formats.load_matrix(args.b)
    if args.div == "qjsd":
        value = divergences.qjsd(a, b)
    elif args.div == "sdiv":
        value = divergences.s_divergence_sq(a, b)
    elif args.div == "relent":
        value = divergences.relative_entropy(a, b)
    else:
        value = divergences.jensen_f_divergence(divergences.parse_function(args.f), a, b)
    _emit(args, formats.format_float(value))
    return EXIT_OK


def _cmd_verify_integral(args):
    a = formats.load_matrix(args.a)
    b = formats.load_matrix(args.b)
    cfg = QuadratureConfig(cutoff=args.cutoff, panels=args.panels)
    report = verify_representation(a, b, cfg)
    _emit(args, formats.dumps_report(report.to_dict()))
    return EXIT_OK if report.abs_error <= args.tol else EXIT_VIOLATION


def _suite_output(args, report):
    body = report.to_dict()
    elapsed = body.pop("elapsed")
    print(f"{report.name}: {report.trials} trials in {elapsed:.2f}s", file=sys.stderr)
    _emit(args, formats.dumps_report(body))
    return EXIT_VIOLATION if report.violations else EXIT_OK


def _cmd_test_metric(args):
    cfg = harness.SamplerConfig(seed=args.seed, dim=args.dim, rank=args.rank, count=args.trials)
    return _suite_output(args, harness.run_metric_suite(cfg, args.which))


def _cmd_test_monotone(args):
    cfg = harness.SamplerConfig(seed=args.seed, dim=args.dim, rank=args.rank, count=args.trials)
    status = EXIT_OK
    if args.which in ("monotone", "both"):
        status = max(status, _suite_output(args, harness.run_monotonicity_suite(cfg)))
    if args.which in ("convex", "both"):
        status = max(status, _suite_output(args, harness.run_convexity_suite(cfg)))
    return status


def _cmd_qubit_embed(args):
    points = formats.load_point_set(args.points)
    report = qubit.kernel_check(points, divergences.parse_function(args.f))
    try:
        result = qubit.mds_embed(report)
    except NotEmbeddable as exc:
        _emit(args, formats.dumps_report({"error": str(exc), **report.to_dict()}))
        return EXIT_VIOLATION
    _emit(args, formats.dumps_report(result.to_dict()))
    return EXIT_OK


def _cmd_kernel_check(args):
    points = formats.load_point_set(args.points)
    report = qubit.kernel_check(points, divergences.parse_function(args.f))
    _emit(args, formats.dumps_report({"f": args.f, **report.to_dict()}))
    return EXIT_OK if report.negative_definite else EXIT_VIOLATION


def _cmd_counterexample(args):
    mat, eig = qubit.briet_harremoes_counterexample()
    _emit(args, formats.dumps_report({"matrix": mat, "eigenvalues": list(eig), "indefinite": True}))
    return EXIT_OK


def _cmd_explore(args):
    found = 0
    for cand in explore(args.mode, args.seed, args.budget, dim=args.dim):
        found += cand.witness
        _emit(args, formats.dumps_report(cand.to_dict()))
    print(f"explore {args.mode}: {found} candidate witness(es)", file=sys.stderr)
    return EXIT_OK


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qjsd", description="Quantum Jensen-Shannon divergence toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="append the report to FILE instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("compute", _cmd_compute, "evaluate a divergence between two matrix files")
    p.add_argument("--div", choices=["qjsd", "sdiv", "relent", "jf"], required=True)
    p.add_argument("--f", default="eta", help="eta | neglog | square | ft:T (for --div jf)")
    p.add_argument("a")
    p.add_argument("b")

    p = add("verify-integral", _cmd_verify_integral, "check the integral representation of J")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--cutoff", type=float, default=100.0)
    p.add_argument("--panels", type=_positive_int, default=64)
    p.add_argument("--tol", type=float, default=1e-7)

    p = add("test-metric", _cmd_test_metric, "randomized triangle-inequality suite")
    p.add_argument("--dim", type=_positive_int, default=2)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rank", type=_positive_int, default=None)
    p.add_argument("--which", choices=["qjsd", "sdiv"], default="qjsd")

    p = add("test-monotone", _cmd_test_monotone, "monotonicity / joint convexity suites")
    p.add_argument("--dim", type=_positive_int, default=2)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rank", type=_positive_int, default=None)
    p.add_argument("--which", choices=["monotone", "convex", "both"], default="both")

    p = add("qubit-embed", _cmd_qubit_embed, "Euclidean embedding of sqrt(J_f) on a point set")
    p.add_argument("points")
    p.add_argument("--f", default="eta")

    p = add("kernel-check", _cmd_kernel_check, "negative-definiteness check of J_f on a point set")
    p.add_argument("points")
    p.add_argument("--f", default="eta")

    add("counterexample", _cmd_counterexample, "the indefinite 2x2 kernel matrix fixture")

    p = add("explore", _cmd_explore, "search for non-embeddability witnesses")
    p.add_argument("--mode", choices=list(MODES), required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--budget", type=_positive_int, default=200)
    p.add_argument("--dim", type=_positive_int, default=3, help="matrix size for qjsd-n3")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if getattr(args, "rank", None) is not None and args.rank > args.dim:
            raise ValidationError(f"--rank must not exceed --dim ({args.dim})")
        return args.func(args)
    except NumericalInconsistency as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except QJSDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

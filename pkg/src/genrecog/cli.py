"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 numeric failure (singular matrix, diverging iteration).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, io
from .core import SolverConfig
from .dynamics import SolverKind, solve
from .feedforward import classify_feedforward, naive_weights, pseudoinverse
from .learning import add_class, edit_report, learn_expectations, remove_class, set_expectation

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _solver_flags(p: argparse.ArgumentParser, threshold_help: str):
    g = p.add_argument_group("solver")
    g.add_argument("--dt", type=float, help="Euler step (default: 1/||M^T M|| for ls, 1.0 for rf)")
    g.add_argument("--tol", type=float, default=SolverConfig.convergence_tol, help="stop when ||dY||_inf < tol")
    g.add_argument("--max-iter", type=int, default=SolverConfig.max_iterations)
    g.add_argument("--threshold", type=float, help=threshold_help)


def _config(args) -> SolverConfig:
    try:
        return SolverConfig(
            dt=args.dt,
            convergence_tol=args.tol,
            max_iterations=args.max_iter,
            target_threshold=args.threshold,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_learn(args) -> int:
    data = io.read_dataset(args.dataset)
    M = learn_expectations(data)
    io.write_model(M, args.output)
    print(f"learned {M.n_classes} classes over {M.n_features} features -> {args.output}")
    return EXIT_OK


def cmd_classify(args) -> int:
    M = io.read_model(args.model)
    x = args.input
    if x.shape[0] != M.n_features:
        raise io.ParseError("--input", None, None, f"input has {x.shape[0]} values, model has N={M.n_features} features")
    if np.any(x < 0):
        raise ValueError("input features must be nonnegative")

    if args.naive_ff or args.solver == "ff":
        W = naive_weights(M) if args.naive_ff else pseudoinverse(M)
        y = classify_feedforward(W, x)
        for label, v in zip(M.class_labels, y):
            print(f"{label}\t{v:.6g}")
        print("stop_reason: feedforward (single pass)")
        return EXIT_OK

    M.check()
    kind = SolverKind(args.solver)
    config = _config(args)
    target = None
    if config.target_threshold is not None:
        if args.target is None:
            raise UsageError("--threshold needs --target CLASS")
        target = M.class_index(args.target)
    y0 = args.y0
    if y0 is not None and y0.shape[0] != M.n_classes:
        raise io.ParseError("--y0", None, None, f"y0 has {y0.shape[0]} values, model has H={M.n_classes} classes")
    y, trace = solve(M, x, y0, kind, config, target=target)
    for label, v in zip(M.class_labels, y):
        print(f"{label}\t{v:.6g}")
    print(f"stop_reason: {trace.stop_reason.value}")
    print(f"iterations: {trace.n_iterations}")
    if args.trace:
        io.write_trace(trace, args.trace)
    return EXIT_OK


def cmd_edit(args) -> int:
    M = io.read_model(args.model)
    if args.action == "add-class":
        edited = add_class(M, args.label, args.values)
    elif args.action == "set":
        edited = set_expectation(M, args.class_label, args.feature_label, args.value)
    else:
        edited = remove_class(M, args.label)
    io.write_model(edited, args.output)
    report = edit_report(M, edited)
    for line in report.lines():
        print(line)
    n_added = len(report.added_classes) * edited.n_features
    print(f"entries changed: {report.n_changed}; entries added: {n_added}; other stored entries unchanged")
    return EXIT_OK


def cmd_derive_w(args) -> int:
    M = io.read_model(args.model).check()
    W = pseudoinverse(M)
    io.write_weights(W, args.output)
    print(f"condition number: {analysis.condition_number(M)!r}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.random:
        patterns = analysis.random_patterns(args.count, args.dim, args.seed, args.generator)
    else:
        patterns = [vec for vec, _ in io.read_dataset(args.patterns).exemplars]
    if len(patterns) < 2:
        raise ValueError("experiment needs at least two patterns")
    results = analysis.sweep_all_pairs(patterns, _config(args))
    io.write_experiment(results, args.output)
    summary = analysis.summarize(results)
    n_singular = sum(r.singular for r in results)
    print(f"pairs: {summary.n_pairs} (singular: {n_singular}, used for correlations: {summary.n_used})")
    print(f"rank correlation similarity vs iterations_ls: {summary.rho_iterations_ls:.4f}")
    print(f"rank correlation similarity vs iterations_rf: {summary.rho_iterations_rf:.4f}")
    print(f"rank correlation similarity vs condition_number: {summary.rho_condition:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genrecog", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="average a labelled dataset into an expectation model")
    p.add_argument("dataset", help="CSV with header: label, feature...")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("classify", help="recognise one input vector")
    p.add_argument("model")
    p.add_argument("--input", required=True, type=_vector, help="comma-separated feature values")
    p.add_argument("--solver", choices=["rf", "ls", "ff"], default="rf")
    p.add_argument("--naive-ff", action="store_true", help="use the expectations themselves as feedforward weights")
    p.add_argument("--trace", help="write the per-iteration trace CSV here")
    p.add_argument("--target", help="class whose activation is compared with --threshold")
    p.add_argument("--y0", type=_vector, help="initial activations (default 1e-4 each)")
    _solver_flags(p, "stop once the --target activation reaches this value")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("edit", help="localized online edits of a model")
    p.add_argument("model")
    actions = p.add_subparsers(dest="action", required=True)
    out = _Parser(add_help=False)
    out.add_argument("-o", "--output", required=True)
    a = actions.add_parser("add-class", parents=[out])
    a.add_argument("label")
    a.add_argument("values", type=_vector)
    a = actions.add_parser("set", parents=[out])
    a.add_argument("class_label")
    a.add_argument("feature_label")
    a.add_argument("value", type=float)
    a = actions.add_parser("remove-class", parents=[out])
    a.add_argument("label")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("derive-w", help="write the pseudoinverse feedforward weights as CSV")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_derive_w)

    p = sub.add_parser("experiment", help="similarity / difficulty sweep over all pattern pairs")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--patterns", help="CSV of patterns in dataset format (labels ignored)")
    src.add_argument("--random", action="store_true", help="generate seeded random patterns")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=26)
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--generator", choices=["composite", "uniform"], default="composite")
    p.add_argument("-o", "--output", required=True)
    _solver_flags(p, f"target activation (default {analysis.DEFAULT_THRESHOLD})")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"genrecog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"genrecog: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"genrecog: error: {msg}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

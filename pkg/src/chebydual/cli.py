"""Command-line interface: solve, table, eval and compare."""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from .config import ChebyDualConfig, Z0Mode
from .errors import ChebyDualError, DigestMismatch
from .evaluation.table import TableComparator
from .harness.loader import TableLoader, evaluate_model, load_grid, load_model
from .harness.runner import TableRunner, ipm_config, lawson_config, load_problem, run_spec
from .models.result import Method
from .models.run import RunSpec
from .problems.builtin import BUILTIN_PROBLEMS, builtin_problem
from .reporting.formatters import ReportFormatter, node_digest
from .solvers.ipm import ipm_solve
from .solvers.lawson import lawson_solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CAPPED = 2


def _snapshot_list(text: str) -> list[int]:
    try:
        return [int(k) for k in text.split(",") if k.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--problem", choices=sorted(BUILTIN_PROBLEMS), help="Built-in problem")
    source.add_argument("--input", type=Path, help="Node CSV (x_re,x_im,f_re,f_im)")
    parser.add_argument("--dim", type=int, required=True, help="Basis dimension n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chebydual",
        description="Discrete Chebyshev approximation through the L2-weighted dual",
    )
    parser.add_argument(
        "--verbose", "-v", action="count", default=0, help="Log solver progress (-vv for debug)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve one problem")
    _add_source(solve)
    solve.add_argument("--method", choices=[m.value for m in Method], default="ipm")
    solve.add_argument("--q", type=int, choices=[1, 2], default=1, help="Lawson update exponent")
    solve.add_argument("--max-iter", type=int, help="Iteration cap (Lawson max_iter, IPM k_max)")
    solve.add_argument("--tol-d", type=float, help="IPM relative d-change tolerance")
    solve.add_argument("--tol-kkt", type=float, help="IPM KKT residual tolerance, relative to max grad d(w0)")
    solve.add_argument("--tol-stop", type=float, help="Lawson relative change tolerance")
    solve.add_argument("--filter-tol", help="Weight filter threshold, e.g. 1e-6/m")
    solve.add_argument("--tau", type=float, help="Fraction-to-boundary parameter")
    solve.add_argument("--mu0", type=float, help="Initial barrier parameter, relative to max grad d(w0)")
    solve.add_argument("--z0", choices=[z.value for z in Z0Mode], help="Initial z")
    solve.add_argument("--snapshots", type=_snapshot_list, default=[], help="Lawson iterations to record, e.g. 30,50,100")
    solve.add_argument("--out", type=Path, help="Report JSON")
    solve.add_argument("--history", type=Path, help="History CSV")
    solve.add_argument("--weights", type=Path, help="Weights CSV")
    solve.add_argument("--curve", type=Path, help="Fitted-curve CSV")
    solve.add_argument("--grid", type=Path, help="Evaluation points for --curve (default: the nodes)")
    solve.add_argument("--model", type=Path, help="Model file for later evaluation")

    table = sub.add_parser("table", help="Reproduce a published results table")
    table.add_argument("which", help="Table number")
    table.add_argument("--problems", nargs="+", help="Restrict to these problems")
    table.add_argument("--methods", nargs="+", choices=["lawson", "ipm"], help="Restrict to these methods")
    table.add_argument("--out", type=Path, help="Comparison CSV (default results/table<N>.csv)")
    table.add_argument("--markdown", type=Path, help="Comparison as a Markdown table")
    table.add_argument("--rtol", type=float, default=1e-3, help="Relative tolerance for r_inf and d")
    table.add_argument("--node-atol", type=int, default=0, help="Allowed final-node difference")

    ev = sub.add_parser("eval", help="Evaluate a saved model")
    ev.add_argument("--model", type=Path, required=True, help="Model file from solve --model")
    ev.add_argument("--points", type=Path, required=True, help="Points CSV (x_re[,x_im])")
    check = ev.add_mutually_exclusive_group()
    check.add_argument("--grid", type=Path, help="Source node CSV to verify against the model")
    check.add_argument("--problem", choices=sorted(BUILTIN_PROBLEMS), help="Source built-in problem")
    ev.add_argument("--out", type=Path, help="Output CSV (default: stdout)")

    compare = sub.add_parser("compare", help="Lawson (q=1) against the IPM on one problem")
    _add_source(compare)
    compare.add_argument("--max-iter", type=int, help="Lawson iteration cap")
    compare.add_argument("--filter-tol", help="Weight filter threshold, e.g. 1e-6/m")
    compare.add_argument("--snapshots", type=_snapshot_list, default=[], help="Lawson iterations to record")
    compare.add_argument("--history", type=Path, help="Combined history CSV")
    compare.add_argument("--weights", type=Path, help="Combined weights CSV")

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def cmd_solve(args: argparse.Namespace, config: ChebyDualConfig) -> int:
    spec = RunSpec(
        problem=args.problem,
        input=args.input,
        dim=args.dim,
        method=Method(args.method),
        q=args.q,
        max_iter=args.max_iter,
        tol_d=args.tol_d,
        tol_kkt=args.tol_kkt,
        tol_stop=args.tol_stop,
        filter_tol=args.filter_tol,
        tau=args.tau,
        mu0=args.mu0,
        z0=args.z0,
        snapshots=args.snapshots,
        out=args.out,
        history=args.history,
        weights=args.weights,
        curve=args.curve,
        grid=args.grid,
        model=args.model,
    )
    problem, report = run_spec(spec, config)

    if spec.out:
        ReportFormatter.to_json(report, problem, spec.out)
        print(f"Report saved to: {spec.out}")
    if spec.history:
        ReportFormatter.write_csv(ReportFormatter.history_frame(report), spec.history)
        print(f"History saved to: {spec.history}")
    if spec.weights:
        ReportFormatter.write_csv(ReportFormatter.weights_frame(report, problem), spec.weights)
        print(f"Weights saved to: {spec.weights}")
    if spec.curve:
        points = load_grid(spec.grid) if spec.grid else None
        ReportFormatter.write_csv(ReportFormatter.curve_frame(report, problem, points), spec.curve)
        print(f"Curve saved to: {spec.curve}")
    if spec.model:
        model = ReportFormatter.model_file(report, problem)
        spec.model.write_text(model.model_dump_json(indent=2))
        print(f"Model saved to: {spec.model}")

    ReportFormatter.print_summary(report)
    return EXIT_OK if report.converged else EXIT_CAPPED


def cmd_table(args: argparse.Namespace, config: ChebyDualConfig) -> int:
    available = TableLoader(config.tables_dir).available()
    if not args.which.isdigit() or int(args.which) not in available:
        print(f"Error: unknown table {args.which!r}; available: {available}", file=sys.stderr)
        return EXIT_ERROR
    which = int(args.which)

    runner = TableRunner(config)
    outcomes = asyncio.run(runner.run(which, problems=args.problems, methods=args.methods))
    comparator = TableComparator(rtol=args.rtol, node_atol=args.node_atol)
    rows = comparator.compare_all(outcomes)

    out = args.out or config.results_dir / f"table{which}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    ReportFormatter.write_csv(ReportFormatter.table_frame(rows), out)
    print(f"\nComparison saved to: {out}")
    if args.markdown:
        args.markdown.write_text(ReportFormatter.table_markdown(rows) + "\n")
        print(f"Markdown table saved to: {args.markdown}")

    ReportFormatter.print_table_summary(outcomes, rows)
    return EXIT_OK if all(o.success for o in outcomes) else EXIT_ERROR


def cmd_eval(args: argparse.Namespace, config: ChebyDualConfig) -> int:
    model = load_model(args.model)
    source = None
    if args.grid:
        source = load_grid(args.grid)
    elif args.problem:
        source = builtin_problem(args.problem).nodes
    if source is not None:
        digest = node_digest(source)
        if digest != model.node_digest:
            raise DigestMismatch(model.node_digest, digest)

    points = load_grid(args.points)
    frame = ReportFormatter.curve_frame_from_values(points, evaluate_model(model, points))
    if args.out:
        ReportFormatter.write_csv(frame, args.out)
        print(f"Values saved to: {args.out}")
    else:
        ReportFormatter.write_csv(frame, sys.stdout)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, config: ChebyDualConfig) -> int:
    spec = RunSpec(
        problem=args.problem,
        input=args.input,
        dim=args.dim,
        max_iter=args.max_iter,
        filter_tol=args.filter_tol,
        snapshots=args.snapshots,
    )
    problem = load_problem(spec)
    lawson = lawson_solve(problem, lawson_config(spec, config.lawson, problem.m))
    # the Lawson cap must not leak into the IPM
    ipm = ipm_solve(problem, ipm_config(spec.model_copy(update={"max_iter": None}), config.ipm, problem.m))
    reports = {"lawson": lawson, "ipm": ipm}

    if args.history:
        ReportFormatter.write_csv(ReportFormatter.compare_history_frame(reports), args.history)
        print(f"History saved to: {args.history}")
    if args.weights:
        frame = ReportFormatter.compare_weights_frame(reports, problem)
        for k, w in sorted(lawson.snapshots.items()):
            frame[f"w_lawson_k{k}"] = w
        ReportFormatter.write_csv(frame, args.weights)
        print(f"Weights saved to: {args.weights}")

    ReportFormatter.print_summary(lawson)
    ReportFormatter.print_summary(ipm)
    return EXIT_OK if ipm.converged else EXIT_CAPPED


COMMANDS = {
    "solve": cmd_solve,
    "table": cmd_table,
    "eval": cmd_eval,
    "compare": cmd_compare,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = ChebyDualConfig()
        return COMMANDS[args.command](args, config)
    except (ChebyDualError, ValidationError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

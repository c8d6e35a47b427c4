import argparse
import logging
import sys
from dataclasses import dataclass, field

from . import config
from .constraints import get_strategy, strategy_names
from .corpus import run_corpus
from .enumerate import enumerate_traces
from .errors import FlagConflict, LyreError, StaticError, StepBudgetExceeded, StrategyRestriction
from .eval_base import Evaluator, Variant
from .eval_constrained import ConstrainedEvaluator, check_program
from .parser import load
from .values import render_value

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    # Everything `lyre run` writes to stdout, plus its exit code
    lines: list = field(default_factory=list)
    exit_code: int = config.EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="lyre", description="Interpreter for lazy mixin programs")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="evaluate a program and print its result")
    run.add_argument("file")
    run.add_argument("--strategy", choices=strategy_names(), default=config.DEFAULT_STRATEGY)
    run.add_argument("--variant", choices=[v.value for v in Variant], default=config.DEFAULT_VARIANT)
    run.add_argument("--trace", action="store_true", help="print every effect event as seq, kind, payload")
    run.add_argument("--trace-constraints", action="store_true", help="print each constraint rule firing")
    run.add_argument("--dump-constraints", action="store_true", help="print the global constraint after each close")
    run.add_argument("--dump-heap", action="store_true", help="print the heap after the run")
    run.add_argument("--step-budget", type=int, default=config.DEFAULT_STEP_BUDGET)
    run.add_argument("--enumerate", action="store_true", help="explore every predecessor choice and list distinct traces")

    corpus = commands.add_parser("corpus", help="run the golden corpus")
    corpus.add_argument("directory", nargs="?", default=config.CORPUS_DIR)
    return parser


def _exit_code(exc, evaluating):
    if isinstance(exc, StepBudgetExceeded):
        return config.EXIT_BUDGET
    if isinstance(exc, (StrategyRestriction, FlagConflict)):
        return config.EXIT_STATIC
    if isinstance(exc, StaticError) and not evaluating:
        return config.EXIT_STATIC
    return config.EXIT_RUNTIME


def _error(report, exc, evaluating):
    report.lines.append(f"error: {exc}")
    report.exit_code = _exit_code(exc, evaluating)
    return report


def execute(source, args):
    # Run one program with parsed `run` options; never raises LyreError
    report = RunReport()
    try:
        program, expr = load(source)
        variant = Variant(args.variant)
        constrained = args.strategy != "pure-lazy" or program.has_annotations
        if variant is not Variant.LAZY and (constrained or args.enumerate):
            raise FlagConflict(f"--variant {variant.value} cannot be combined with evaluation-order constraints")
        if constrained:
            check_program(expr, get_strategy(args.strategy))
    except LyreError as exc:
        return _error(report, exc, evaluating=False)

    if args.enumerate:
        found = enumerate_traces(expr, args.strategy, max_runs=config.ENUMERATE_MAX_RUNS)
        for trace in found.traces:
            report.lines.append("trace: " + " ".join(trace))

    logger.debug("[Run] strategy %s, variant %s, constrained %s", args.strategy, variant.value, constrained)
    if constrained or args.enumerate:
        evaluator = ConstrainedEvaluator(args.strategy, args.step_budget)
    else:
        evaluator = Evaluator(variant, args.step_budget)

    failure = None
    try:
        outcome = evaluator.run(expr)
    except LyreError as exc:
        failure = exc

    for event in evaluator.effects.trace:
        if args.trace:
            report.lines.append(event.line())
        elif event.kind.value == "print":
            report.lines.append(event.payload)
    if args.trace_constraints:
        report.lines.extend(getattr(evaluator, "events", []))
    if args.dump_constraints:
        for number, snapshot in enumerate(getattr(evaluator, "snapshots", []), start=1):
            report.lines.append(f"constraints after close {number}:")
            report.lines.extend(f"  {line}" for line in snapshot)
    if args.dump_heap:
        report.lines.extend(evaluator.heap.dump())

    if failure is not None:
        return _error(report, failure, evaluating=True)
    report.lines.append(f"result: {render_value(outcome.value)}")
    return report


def _run_file(path, argv):
    # Used by the corpus runner: run `path` with the flags recorded for it
    args = build_parser().parse_args(["run", path, *argv])
    with open(path, encoding="utf-8") as handle:
        return execute(handle.read(), args)


def cmd_run(args):
    try:
        with open(args.file, encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        print(f"Error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return config.EXIT_STATIC
    report = execute(source, args)
    for line in report.lines:
        print(line)
    return report.exit_code


def cmd_corpus(args):
    results = run_corpus(args.directory, _run_file)
    for result in results:
        print(result.line())
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed} passed, {failed} failed")
    return config.EXIT_OK if results and not failed else config.EXIT_RUNTIME


def main(argv=None):
    # ----------------------------------------------------------------
    # Parse the command line, configure logging once and dispatch
    # ----------------------------------------------------------------
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=config.LOG_LEVEL, format=config.LOG_FORMAT)
    if args.command == "corpus":
        return cmd_corpus(args)
    return cmd_run(args)

# Exhaustive exploration of the predecessor choices made while forcing cells.
#
# Each run replays a script of choice indices; the first choice point past the
# end of the script takes index 0. After a run, the script is advanced like an
# odometer over the recorded (index, width) pairs until every combination has
# been tried or the run cap is hit.
import logging
from dataclasses import dataclass, field

from . import config
from .errors import LyreError
from .eval_constrained import ConstrainedEvaluator
from .values import render_value

logger = logging.getLogger(__name__)


class ScriptedChooser:
    def __init__(self, script=()):
        self.script = list(script)
        self.record = []

    def __call__(self, loc, preds):
        position = len(self.record)
        index = self.script[position] if position < len(self.script) else 0
        index = min(index, len(preds) - 1)
        self.record.append((index, len(preds)))
        return preds[index]


def _next_script(record):
    # The script for the next run, or None once every branch was explored
    for position in range(len(record) - 1, -1, -1):
        index, width = record[position]
        if index + 1 < width:
            return [i for i, _ in record[:position]] + [index + 1]
    return None


@dataclass
class Enumeration:
    # Distinct print traces in discovery order, each with its outcome text
    traces: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    runs: int = 0
    truncated: bool = False


def enumerate_traces(expr, strategy=config.DEFAULT_STRATEGY,
                     max_runs=config.ENUMERATE_MAX_RUNS, step_budget=config.ENUMERATE_STEP_BUDGET):
    found = Enumeration()
    script = []
    while script is not None:
        if found.runs >= max_runs:
            found.truncated = True
            logger.warning("[Enumerate] stopped after %d runs", found.runs)
            break
        chooser = ScriptedChooser(script)
        evaluator = ConstrainedEvaluator(strategy, step_budget, chooser=chooser)
        try:
            outcome = evaluator.run(expr)
            result = f"result: {render_value(outcome.value)}"
        except LyreError as exc:
            result = f"error: {exc.tag}"
        found.runs += 1
        trace = tuple(evaluator.effects.printed())
        if trace not in found.traces:
            found.traces.append(trace)
            found.outcomes.append(result)
        logger.debug("[Enumerate] script %s -> %s", [i for i, _ in chooser.record], " ".join(trace))
        script = _next_script(chooser.record)
    return found

from dataclasses import dataclass
from typing import Optional

import pytest

from lyre.errors import LyreError
from lyre.eval_base import Evaluator
from lyre.eval_constrained import ConstrainedEvaluator
from lyre.parser import load


@dataclass
class RunResult:
    value: object
    printed: list
    trace: list
    error: Optional[LyreError]
    evaluator: object


def run_source(source, strategy=None, variant="lazy", step_budget=10 ** 6, chooser=None):
    # Evaluate a program; constrained when a strategy is named
    _, expr = load(source)
    if strategy is None:
        evaluator = Evaluator(variant, step_budget)
    elif chooser is None:
        evaluator = ConstrainedEvaluator(strategy, step_budget)
    else:
        evaluator = ConstrainedEvaluator(strategy, step_budget, chooser=chooser)
    value, error = None, None
    try:
        value = evaluator.run(expr).value
    except LyreError as exc:
        error = exc
    return RunResult(value, evaluator.effects.printed(), list(evaluator.effects.trace), error, evaluator)


@pytest.fixture
def run():
    return run_source

# Whole-run properties checked over generated programs and the golden corpus.
import pytest

from lyre import config
from lyre.ast import Lit, Name, Struct, fresh_ident, structure_of
from lyre.cli import build_parser
from lyre.corpus import discover, read_expectation
from lyre.errors import LyreError
from lyre.eval_base import Evaluator, eval_sum
from lyre.enumerate import enumerate_traces
from lyre.parser import load
from lyre.values import render_value

from .conftest import run_source


def _read(name):
    with open(f"{config.CORPUS_DIR}/{name}{config.CORPUS_SUFFIX}", encoding="utf-8") as handle:
        return handle.read()


def _plain_corpus_programs():
    # Programs run with default flags and no annotations
    found = []
    for path, expected in discover(config.CORPUS_DIR):
        if read_expectation(expected).flags:
            continue
        with open(path, encoding="utf-8") as handle:
            source = handle.read()
        try:
            program, _ = load(source)
        except LyreError:
            continue
        if not program.has_annotations:
            found.append(source)
    return found


def _corpus_runs():
    # Every corpus program with the options its expectation runs it under
    found = []
    for path, expected in discover(config.CORPUS_DIR):
        expectation = read_expectation(expected)
        if expectation.exit_code == config.EXIT_STATIC:
            continue
        args = build_parser().parse_args(["run", path, *expectation.flags])
        with open(path, encoding="utf-8") as handle:
            source = handle.read()
        program, _ = load(source)
        constrained = args.strategy != "pure-lazy" or program.has_annotations or args.enumerate
        name = path.rsplit("/", 1)[-1]
        found.append(pytest.param(source, args.strategy if constrained else None, args.variant, id=name))
    return found


def _outcome(result):
    if result.error is not None:
        return ("error", result.error.tag)
    return ("result", render_value(result.value))


# ==========================================
# MEMOIZATION AND EFFECT LINEARITY
# ==========================================

def test_lazy_forces_each_cell_at_most_once():
    result = run_source(_read("memo_lazy"))
    assert result.printed == ["1"]
    assert max(result.evaluator.heap.force_counts.values()) == 1


@pytest.mark.parametrize("source, strategy, variant", _corpus_runs())
def test_memoizing_variants_force_each_cell_at_most_once(source, strategy, variant):
    if variant == "cbn":
        pytest.skip("call-by-name re-evaluates on every access")
    result = run_source(source, strategy=strategy, variant=variant)
    assert all(count <= 1 for count in result.evaluator.heap.force_counts.values())


def test_cbn_forces_again_on_each_use():
    result = run_source(_read("memo_cbn"), variant="cbn")
    assert result.printed == ["1", "1"]
    assert max(result.evaluator.heap.force_counts.values()) >= 2


def test_configuration_precedes_the_escaping_form():
    result = run_source(_read("widgets_sentinel"), strategy="recmod")
    kinds = [event.kind.value for event in result.trace]
    shown = kinds.index("print")
    assert kinds.count("widget-configure") == 4
    assert all(i < shown for i, kind in enumerate(kinds) if kind == "widget-configure")


@pytest.mark.parametrize("instances", [1, 2, 5])
def test_each_instance_runs_its_effects_once(instances):
    closes = "\n".join(f"mixin A{i} = close(M)" for i in range(instances))
    uses = "; ".join(f"A{i}.c; A{i}.c" for i in range(instances))
    source = f'mixin M = {{ let c = print "made" }}\n{closes}\nlet main = {uses}'
    assert run_source(source).printed == ["made"] * instances


def test_closed_key_generator_is_shared():
    assert run_source(_read("sets")).printed == ["[0]", "[[1]]"]
    assert run_source(_read("sets_prime")).printed == ["[0]", "[[0]]"]


# ==========================================
# MIXIN ALGEBRA
# ==========================================

def _single(text):
    x = fresh_ident(text)
    return structure_of(Struct({}, {Name(text): x}, {x: Lit(1)}))


def test_sum_is_associative_on_exported_names():
    a, b, c = _single("a"), _single("b"), _single("c")
    left = eval_sum(eval_sum(a, b), c)
    right = eval_sum(a, eval_sum(b, c))
    assert left.output_names() == right.output_names() == ["a", "b", "c"]
    assert len(left.binding) == len(right.binding) == 3


def test_sum_associativity_at_run_time():
    parts = 'mixin A = { let a = 1 } mixin B = { let b = 2 } mixin C = { val a : int let c = a + 10 }'
    left = run_source(f"{parts} let main = close(freeze[a |-> a]((A <- B) <- C)).c")
    right = run_source(f"{parts} let main = close(freeze[a |-> a](A <- (B <- C))).c")
    assert left.value == right.value == 11


# ==========================================
# STRATEGIES
# ==========================================

@pytest.mark.parametrize("source", _plain_corpus_programs())
def test_pure_lazy_strategy_matches_the_base_evaluator(source):
    plain = run_source(source)
    constrained = run_source(source, strategy="pure-lazy")
    assert constrained.printed == plain.printed
    assert _outcome(constrained) == _outcome(plain)


@pytest.mark.parametrize("source", _plain_corpus_programs())
def test_alpha_refreshed_literals_give_the_same_run(source):
    _, expr = load(source)
    runs = []
    for refresh in (False, True):
        evaluator = Evaluator(step_budget=10 ** 6, refresh_literals=refresh)
        try:
            outcome = ("result", render_value(evaluator.run(expr).value))
        except LyreError as exc:
            outcome = ("error", exc.tag)
        runs.append(([event.line() for event in evaluator.effects.trace], outcome))
    assert runs[0] == runs[1]


def test_enumerated_traces_respect_the_ordering_pairs():
    _, expr = load(_read("choices"))
    found = enumerate_traces(expr)
    assert sorted(found.traces) == [("1", "2", "3", "4"), ("2", "1", "3", "4")]
    for trace in found.traces:
        assert trace.index("1") < trace.index("3")
        assert trace.index("2") < trace.index("4")
    assert not found.truncated


def test_enumeration_stops_at_the_run_cap():
    _, expr = load(_read("choices"))
    found = enumerate_traces(expr, max_runs=1)
    assert found.runs == 1
    assert found.truncated


# ==========================================
# TERMINATION
# ==========================================

@pytest.mark.parametrize("name, strategy", [("widgets", "recmod"), ("classes", "objinit"), ("sets", None)])
def test_runs_are_deterministic(name, strategy):
    first = run_source(_read(name), strategy=strategy)
    second = run_source(_read(name), strategy=strategy)
    assert first.error is None
    assert [e.line() for e in first.trace] == [e.line() for e in second.trace]
    assert first.evaluator.steps == second.evaluator.steps
    assert first.evaluator.steps < config.DEFAULT_STEP_BUDGET

import pytest

from lyre.ast import LocalConstraint, Lit, Name, Struct, external, fresh_ident, ordinary, structure_of
from lyre.enumerate import ScriptedChooser, _next_script, enumerate_traces
from lyre.errors import (
    ConstraintViolation, CyclicDependency, OpenMixinOperation, StrategyRestriction,
)
from lyre.eval_constrained import ConstrainedEvaluator
from lyre.heap import HeapExpr
from lyre.parser import load

from .conftest import run_source

M2_M3 = """
mixin M2 = close({ let c1 = 1 let c2 = 2 * M3.c1 %s })
mixin M3 = close({ let c1 = 3 + M2.c1 })
let main = M2.c2
"""

M4 = 'mixin M4 = close({ let c1 = 1 + 2 let c2 = c1 + 4 let c3 = print "ok" }) let main = M4.c2'

TRIGGER = """
mixin M1 = close({ let c1 = print 1 let c2 = M2.c2 let c3 = print (c1 + c2) let c4 = print 5 })
mixin M2 = close({ let c1 = M1.c1 let c2 = print (c1 + 1) let c3 = print 4 })
let main = M1.c3
"""

CLASSES = """
mixin A = { let init = print "init" let a1 = print "a1" }
mixin B = { let b1 = print "b1" let b2 = print "b2" }
mixin C = { let c1 = print (if Obj.b1 = "b1" then "c1" else "?") }
mixin Obj = close((A <- B) <- C)
let main = Obj.init
"""

CHOICES = """
mixin M1 = close({
  let c1 = print 1 let c2 = print 2 let c3 = print 3 let c4 = print 4
  let all = (c3; c4)
  constraint (c1, c3) (c2, c4) (c1, all) (c2, all)
})
let main = M1.all
"""


def _closed_value(names, constraint_pairs=()):
    binding, outputs = {}, {}
    for text in names:
        x = fresh_ident(text)
        binding[x] = Lit(text)
        outputs[Name(text)] = x
    ids = {x.base: x for x in binding}
    theta = {(ordinary(ids[a]), external(ids[b])) for a, b in constraint_pairs}
    return structure_of(Struct({}, outputs, binding, LocalConstraint(theta)))


# ==========================================
# CLOSE
# ==========================================

def test_close_allocates_three_cells_per_component():
    evaluator = ConstrainedEvaluator("pure-lazy")
    v = _closed_value(["a", "b"], [("a", "b")])
    closed = evaluator.ceval_close(v)
    assert len(evaluator.heap) == 6
    # own cells first, then internal-access cells, then external-access cells
    assert sorted(ref.loc.index for ref in closed.binding.values()) == [4, 5]
    assert evaluator.pi.render() == ["l0 -> l5"]
    assert closed.closed and closed.constraint.is_empty()


def test_close_of_empty_structure_adds_nothing():
    evaluator = ConstrainedEvaluator("recmod")
    closed = evaluator.ceval_close(_closed_value([]))
    assert closed.binding == {} and len(evaluator.heap) == 0
    assert evaluator.pi.render() == []


def test_close_requires_no_deferred_components():
    evaluator = ConstrainedEvaluator("pure-lazy")
    x = fresh_ident("x")
    with pytest.raises(OpenMixinOperation):
        evaluator.ceval_close(structure_of(Struct({x: Name("x")}, {}, {})))


def test_recmod_close_instantiates_top_down_and_external_edges():
    evaluator = ConstrainedEvaluator("recmod")
    _, expr = load(M4)
    evaluator.run(expr)
    # the top level closes first (six cells, no edges); M4 owns l6-l8 and exports l12-l14
    assert evaluator.snapshots[0] == []
    m4_edges = evaluator.snapshots[1]
    assert {"l6 -> l7", "l6 -> l8", "l7 -> l8"} <= set(m4_edges)
    assert {f"l{i} -> l{j}" for i in range(6, 9) for j in range(12, 15)} <= set(m4_edges)
    assert len(m4_edges) == 12


def test_objinit_close_adds_one_trigger_set():
    evaluator = ConstrainedEvaluator("objinit")
    _, expr = load('mixin O = close({ let f = 1 let g = 2 }) let main = O.f')
    evaluator.run(expr)
    groups = [line for line in evaluator.snapshots[1] if line.startswith("{")]
    assert groups == ["{l6, l7}"]


# ==========================================
# LOCATION FORCING
# ==========================================

def test_lazy_field_access_succeeds():
    result = run_source(M2_M3 % "constraint (c1, c2)", strategy="pure-lazy")
    assert result.error is None and result.value == 8


def test_external_access_against_the_order_fails():
    result = run_source(M2_M3 % "constraint (c1, c2) (c2, ext c1)", strategy="pure-lazy")
    assert isinstance(result.error, ConstraintViolation)


def test_lazy_record_rejects_inter_mixin_recursion():
    result = run_source(M2_M3 % "", strategy="lazy-record")
    assert isinstance(result.error, ConstraintViolation)


def test_recmod_runs_the_whole_mixin_before_outside_access():
    result = run_source(M4, strategy="recmod")
    assert result.printed == ["ok"]
    assert result.value == 7
    assert run_source(M4).printed == []


def test_trigger_sets_evaluate_whole_mixins():
    result = run_source(TRIGGER, strategy="trigger-topdown")
    assert result.printed == ["1", "2", "4", "3", "5"]
    assert result.value == 3


def test_class_fields_initialize_superclass_first():
    result = run_source(CLASSES, strategy="objinit")
    assert result.printed == ["init", "a1", "b1", "b2", "c1"]
    assert result.value == "init"


def test_objinit_rejects_nested_mixins_before_running():
    result = run_source('mixin A = { mixin inner = { } let x = print 1 } let main = close(A).x', strategy="objinit")
    assert isinstance(result.error, StrategyRestriction)
    assert result.printed == []


def test_objinit_rejects_sums_of_closed_mixins():
    result = run_source('mixin A = close({ let a = 1 }) mixin B = { let b = 2 } let main = close(A <- B).b',
                        strategy="objinit")
    assert isinstance(result.error, StrategyRestriction)


@pytest.mark.parametrize("wrapped", ["hide[zz](A)", "rename[(), (a |-> a)](A)"])
def test_objinit_sees_closed_mixins_through_other_operators(wrapped):
    source = f'mixin A = close({{ let a = print 1 }}) mixin B = {{ let b = print 2 }} let main = close({wrapped} <- B).b'
    result = run_source(source, strategy="objinit")
    assert isinstance(result.error, StrategyRestriction)
    assert result.printed == []


def test_recmod_runs_core_components_before_later_sub_mixins():
    source = "let main = close({ let c1 = close(m).z mixin m = { let z = print 2 } }).c1"
    result = run_source(source, strategy="recmod")
    assert isinstance(result.error, ConstraintViolation)
    assert result.printed == []
    assert run_source(source).value == 2


def test_summing_a_closed_mixin_does_not_order_its_components_again():
    source = """
    mixin K = close({ let k = print 1 })
    mixin S = close(K <- { let s = print 2 })
    let main = S.s
    """
    result = run_source(source, strategy="recmod")
    assert result.printed == ["2"]
    assert result.value == 2


def test_cycles_are_still_detected():
    result = run_source("let main = close({ let c = c }).c", strategy="recmod")
    assert isinstance(result.error, CyclicDependency)


def test_rule_firings_are_recorded():
    result = run_source("mixin M = close({ let a = 1 let b = a constraint (a, b) }) let main = M.b",
                        strategy="pure-lazy")
    events = result.evaluator.events
    assert any(e.startswith("EDGE") and e.endswith("consumed") for e in events)
    assert events[-1].startswith("MEMO")
    assert result.evaluator.rule_counts["edge"] == 1


def test_forced_cells_hold_values_without_pending_edges():
    result = run_source(M4, strategy="recmod")
    evaluator = result.evaluator
    forced = [loc for loc, count in evaluator.heap.force_counts.items() if count]
    assert forced
    for loc in forced:
        assert evaluator.pi.predecessors(loc) == []
        assert max(evaluator.heap.force_counts.values()) == 1


def test_trigger_member_cannot_hold_a_value():
    evaluator = ConstrainedEvaluator("pure-lazy")
    loc = evaluator.heap.alloc(HeapExpr(Lit(1)))
    evaluator.heap.memoize(loc, 1)
    evaluator.pi.add(delta=[{loc}])
    with pytest.raises(AssertionError):
        evaluator.ceval_loc(loc)


@pytest.mark.parametrize("strategy", ["pure-lazy", "recmod", "trigger-topdown", "lazy-record"])
def test_smallest_predecessor_is_deterministic(strategy):
    first = run_source(TRIGGER, strategy=strategy)
    second = run_source(TRIGGER, strategy=strategy)
    assert first.printed == second.printed


# ==========================================
# CHOICE ENUMERATION
# ==========================================

def test_default_choice_is_the_smallest_location():
    assert run_source(CHOICES, strategy="pure-lazy").printed == ["1", "2", "3", "4"]


def test_scripted_choice_picks_the_other_order():
    result = run_source(CHOICES, strategy="pure-lazy", chooser=ScriptedChooser([1]))
    assert result.printed == ["2", "1", "3", "4"]


def test_next_script_advances_like_an_odometer():
    assert _next_script([(0, 2), (0, 1)]) == [1]
    assert _next_script([(1, 2), (0, 3)]) == [1, 1]
    assert _next_script([(1, 2), (2, 3)]) is None
    assert _next_script([]) is None


def test_enumeration_finds_every_permitted_trace():
    _, expr = load(CHOICES)
    found = enumerate_traces(expr, "pure-lazy")
    assert found.traces == [("1", "2", "3", "4"), ("2", "1", "3", "4")]
    assert found.outcomes == ["result: 4", "result: 4"]
    assert not found.truncated
    for trace in found.traces:
        # every explored order respects the declared pairs
        assert trace.index("1") < trace.index("3") and trace.index("2") < trace.index("4")


def test_enumeration_stops_at_the_run_cap():
    _, expr = load(CHOICES)
    found = enumerate_traces(expr, "pure-lazy", max_runs=1)
    assert found.runs == 1 and found.truncated

# Lazy evaluation under a global evaluation-order constraint.
#
# Closing a mixin allocates three cells per component: the component's own
# cell, an internal-access cell used by sibling references, and an
# external-access cell used by projection. Ordering edges between those
# cells and trigger sets over them decide what must be evaluated before a
# cell may be forced.
import logging
from collections import Counter

from . import config
from .ast import LocRef, MixinStructureValue, Struct, subst, walk
from .constraints import GlobalConstraint, get_strategy, instantiate, instantiate_delta
from .errors import ConstraintViolation, CyclicDependency, OpenMixinOperation
from .eval_base import EMPTY_ENV, Evaluator, Variant
from .heap import ErrorSentinel, HeapExpr, HeapValue, SentinelTag

logger = logging.getLogger(__name__)


def smallest_predecessor(loc, preds):
    return preds[0]


def check_program(expr, strategy):
    # Run the strategy's fragment check over every structure literal
    for node in walk(expr):
        if isinstance(node, Struct) and not node.implicit:
            strategy.check_literal(node)


class ConstrainedEvaluator(Evaluator):
    def __init__(self, strategy=config.DEFAULT_STRATEGY, step_budget=config.DEFAULT_STEP_BUDGET,
                 chooser=smallest_predecessor):
        super().__init__(Variant.LAZY, step_budget)
        self.strategy = get_strategy(strategy) if isinstance(strategy, str) else strategy
        self.pi = GlobalConstraint()
        # chooser(loc, sorted predecessors) -> the predecessor forced next
        self.chooser = chooser
        self.events = []
        self.snapshots = []
        self.rule_counts = Counter()

    def run(self, expr):
        check_program(expr, self.strategy)
        return super().run(expr)

    def _event(self, text):
        self.events.append(text)
        logger.debug("[Constraint] %s", text)

    # --- Strategy hooks ---
    def literal_constraint(self, lit):
        return self.strategy.literal_constraint(lit)

    def combine(self, ids1, c1, ids2, c2, sealed=frozenset()):
        return self.strategy.nu(ids1, c1, ids2, c2, sealed=sealed)

    def check_sum(self, v1, v2):
        self.strategy.check_sum(v1, v2)

    # --- Close ---
    def eval_close(self, v):
        return self.ceval_close(v)

    def eval_close_eager(self, v):
        return self.ceval_close(v)

    def ceval_close(self, v):
        if v.input:
            shown = ", ".join(sorted(n.text for n in v.input.values()))
            raise OpenMixinOperation(f"cannot close a mixin with deferred components {shown}")
        heap = self.heap
        defined = list(v.binding)
        own = {x: heap.alloc(HeapExpr(v.binding[x])) for x in defined}
        inside = {x: heap.alloc(HeapExpr(LocRef(own[x]))) for x in defined}
        outside = {x: heap.alloc(HeapExpr(LocRef(own[x]))) for x in defined}
        refs = {x: LocRef(loc) for x, loc in inside.items()}
        for x in defined:
            heap.put(own[x], HeapExpr(subst(v.binding[x], refs)))

        theta = instantiate(v.constraint.theta, own, inside, outside)
        delta = instantiate_delta(v.constraint.delta, own, inside, outside)
        self.pi.add(theta, delta)
        self.rule_counts["close"] += 1
        self.snapshots.append(self.pi.render())
        logger.debug("[Close] %d components, %d edges, %d trigger sets added",
                     len(defined), len(theta), len(delta))

        kept = self.strategy.mu(frozenset(defined), v.constraint)
        binding = {x: LocRef(loc) for x, loc in outside.items()}
        return MixinStructureValue({}, dict(v.output), binding, kept, closed=True)

    # --- Location forcing ---
    def eval_loc(self, loc):
        return self.ceval_loc(loc)

    def ceval_loc(self, loc):
        heap, pi = self.heap, self.pi
        while True:
            obj = heap.read(loc)
            if isinstance(obj, ErrorSentinel):
                if obj.tag is SentinelTag.CONSTRAINT:
                    raise ConstraintViolation(f"{loc} was demanded before its declared predecessors finished")
                raise CyclicDependency(f"{loc} depends on itself")

            group = pi.trigger_set(loc)
            if group is not None:
                assert not isinstance(obj, HeapValue), f"{loc} holds a value but is still in a trigger set"
                pi.consume_trigger(group)
                self.rule_counts["trigger"] += 1
                self._event("TRIGGER {" + ", ".join(str(m) for m in sorted(group)) + "} fired")
                value = self.ceval_loc(loc)
                for member in sorted(group - {loc}):
                    self.ceval_loc(member)
                return value

            preds = pi.predecessors(loc)
            if isinstance(obj, HeapValue):
                assert not preds, f"{loc} holds a value but still has predecessors"
                self.rule_counts["value"] += 1
                return obj.value

            if preds:
                pred = self.chooser(loc, preds)
                if isinstance(heap.read(pred), ErrorSentinel):
                    raise ConstraintViolation(f"{loc} must wait for {pred}, which is still being evaluated")
                displaced = heap.blackhole(loc, SentinelTag.CONSTRAINT)
                pi.consume_edge(pred, loc)
                self.rule_counts["edge"] += 1
                self._event(f"EDGE {pred} -> {loc} consumed")
                self.ceval_loc(pred)
                heap.put(loc, displaced)
                continue

            self.rule_counts["force"] += 1
            self._event(f"FORCE {loc}")
            heap.force_counts[loc] += 1
            heap.blackhole(loc, SentinelTag.CYCLE)
            value = self.eval(obj.expr, EMPTY_ENV)
            heap.memoize(loc, value)
            self._event(f"MEMO {loc}")
            return value

# Big-step evaluator: core forms, the six mixin operators and location forcing.
#
# Three variants share this code: lazy (call-by-need with blackholing),
# cbn (no write-back, no blackholing) and eager (close forces every
# component at once, in textual order).
import logging
import sys
import threading
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

from . import config
from .ast import (
    App, Assign, BinOp, BuiltinRef, Close, Deref, Freeze, Hide, IdentRef, If, Lam, Let, ListLit,
    Lit, LocRef, MixinStructureValue, NameRef, Neg, Project, Rename, Seq, Struct, Sum, TupleLit,
    Var, alpha_refresh, free_idents, free_names, map_compose, map_union, structure_of, subst,
    transform,
)
from .effects import Effects
from .errors import (
    CoreTypeError, CyclicDependency, ConstraintViolation, FreezeMismatch, NameClash,
    OpenMixinOperation, StepBudgetExceeded, UnknownProjection, UnresolvedComponent,
)
from .heap import ErrorSentinel, Heap, HeapExpr, HeapValue, SentinelTag
from .values import Builtin, Closure, ListValue, TupleValue, type_name

logger = logging.getLogger(__name__)

EMPTY_ENV = MappingProxyType({})


class Variant(str, Enum):
    LAZY = "lazy"
    CBN = "cbn"
    EAGER = "eager"


@dataclass
class EvalOutcome:
    value: object
    heap: Heap
    effects: list
    steps: int


# ==========================================
# MIXIN OPERATORS ON STRUCTURE VALUES
# ==========================================

def union_constraints(ids1, c1, ids2, c2, sealed=frozenset()):
    return c1.union(c2)


def eval_sum(v1, v2, nu=union_constraints):
    # Merge two structures; the right operand is alpha-refreshed first
    v2 = alpha_refresh(v2)
    clash = set(v1.output) & set(v2.output)
    if clash:
        shown = ", ".join(sorted(n.text for n in clash))
        raise NameClash(f"both operands export {shown}")
    ids1, ids2 = frozenset(v1.identifiers()), frozenset(v2.identifiers())
    sealed = (ids1 if v1.closed else frozenset()) | (ids2 if v2.closed else frozenset())
    return MixinStructureValue(
        map_union(v1.input, v2.input),
        map_union(v1.output, v2.output),
        map_union(v1.binding, v2.binding),
        nu(ids1, v1.constraint, ids2, v2.constraint, sealed=sealed),
    )


def eval_rename(phi1, v, phi2):
    # phi1 renames deferred names old -> new, phi2 maps new output names -> old
    return MixinStructureValue(
        map_compose(dict(phi1), v.input),
        map_compose(v.output, dict(phi2)),
        dict(v.binding),
        v.constraint,
        v.closed,
    )


def eval_hide(name, v):
    output = {n: x for n, x in v.output.items() if n != name}
    return MixinStructureValue(dict(v.input), output, dict(v.binding), v.constraint, v.closed)


def eval_freeze(psi, v):
    psi = dict(psi)
    resolved = {x: n for x, n in v.input.items() if n in psi}
    remaining = {x: n for x, n in v.input.items() if n not in psi}
    missing = set(psi) - set(resolved.values())
    if missing:
        shown = ", ".join(sorted(n.text for n in missing))
        raise FreezeMismatch(f"no deferred component named {shown}")

    def to_ident(node):
        if isinstance(node, NameRef):
            return IdentRef(v.output[node.name])
        return None

    tied = {}
    for x, name in resolved.items():
        body = psi[name]
        unknown = free_names(body) - set(v.output)
        if unknown:
            shown = ", ".join(sorted(n.text for n in unknown))
            raise FreezeMismatch(f"tying for '{name}' mentions {shown}, which the mixin does not export")
        tied[x] = transform(body, to_ident)
    return MixinStructureValue(remaining, dict(v.output), map_union(v.binding, tied), v.constraint, v.closed)


def eval_close(heap, v):
    # Allocate one location per defined component (the unconstrained close)
    if v.input:
        shown = ", ".join(sorted(n.text for n in v.input.values()))
        raise OpenMixinOperation(f"cannot close a mixin with deferred components {shown}")
    locs = {x: heap.alloc(HeapExpr(body)) for x, body in v.binding.items()}
    refs = {x: LocRef(loc) for x, loc in locs.items()}
    for x, body in v.binding.items():
        heap.put(locs[x], HeapExpr(subst(body, refs)))
    logger.debug("[Close] %d components at %s", len(locs), ", ".join(str(l) for l in locs.values()))
    return MixinStructureValue({}, dict(v.output), refs, closed=True)


# ==========================================
# EVALUATOR
# ==========================================

def _int_div(a, b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


class Evaluator:
    def __init__(self, variant=Variant.LAZY, step_budget=config.DEFAULT_STEP_BUDGET, refresh_literals=False):
        self.variant = Variant(variant)
        self.step_budget = step_budget
        # Alpha-refresh every literal value (used by the alpha-equivalence checks)
        self.refresh_literals = refresh_literals
        self.heap = Heap()
        self.effects = Effects()
        self.steps = 0

    def run(self, expr):
        # Evaluation runs on a worker thread whose C stack holds RECURSION_LIMIT frames
        box = {}

        def target():
            try:
                box["value"] = self._run(expr)
            except BaseException as exc:
                box["error"] = exc

        previous = threading.stack_size(config.EVAL_STACK_SIZE)
        try:
            worker = threading.Thread(target=target, name="lyre-eval", daemon=True)
            worker.start()
        finally:
            threading.stack_size(previous)
        worker.join()
        if "error" in box:
            raise box["error"]
        return box["value"]

    def _run(self, expr):
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, config.RECURSION_LIMIT))
        try:
            value = self.eval(expr, EMPTY_ENV)
        except RecursionError:
            raise StepBudgetExceeded("evaluation nested too deeply") from None
        finally:
            sys.setrecursionlimit(limit)
        return EvalOutcome(value, self.heap, list(self.effects.trace), self.steps)

    # --- Hooks the constrained evaluator overrides ---
    def literal_constraint(self, lit):
        return lit.constraint

    def combine(self, ids1, c1, ids2, c2, sealed=frozenset()):
        return union_constraints(ids1, c1, ids2, c2, sealed)

    def check_sum(self, v1, v2):
        pass

    # --- Dispatch ---
    def eval(self, e, env):
        self.steps += 1
        if self.steps > self.step_budget:
            raise StepBudgetExceeded(f"more than {self.step_budget} evaluation steps")
        match e:
            case Lit(value):
                return value
            case Var(name):
                if name not in env:
                    raise CoreTypeError(f"unbound variable '{name}'")
                return env[name]
            case BuiltinRef(name):
                return Builtin(name)
            case LocRef(loc):
                return self.eval_loc(loc)
            case ListLit(items):
                return ListValue(tuple(self.eval(item, env) for item in items))
            case TupleLit(items):
                return TupleValue(tuple(self.eval(item, env) for item in items))
            case BinOp(op, left, right):
                return self._binop(op, left, right, env)
            case Neg(operand):
                v = self.eval(operand, env)
                if not _is_int(v):
                    raise CoreTypeError(f"unary minus expects an int, got {type_name(v)}")
                return -v
            case If(cond, then, orelse):
                test = self.eval(cond, env)
                if not isinstance(test, bool):
                    raise CoreTypeError(f"if expects a bool, got {type_name(test)}")
                return self.eval(then if test else orelse, env)
            case Lam(param, body):
                return Closure(param, body, env)
            case App(fn, arg):
                f = self.eval(fn, env)
                return self.apply(f, self.eval(arg, env))
            case Let(name, value, body):
                bound = self.eval(value, env)
                return self.eval(body, {**env, name: bound})
            case Seq(first, second):
                self.eval(first, env)
                return self.eval(second, env)
            case Deref(target):
                return self.effects.deref(self.eval(target, env))
            case Assign(target, value):
                cell = self.eval(target, env)
                return self.effects.assign(cell, self.eval(value, env))
            case Struct():
                return self.eval_struct(e)
            case Sum(left, right):
                v1 = self._mixin(left, env, "sum")
                v2 = self._mixin(right, env, "sum")
                self.check_sum(v1, v2)
                return eval_sum(v1, v2, self.combine)
            case Rename(phi1, body, phi2):
                return eval_rename(phi1, self._mixin(body, env, "rename"), phi2)
            case Hide(name, body):
                return eval_hide(name, self._mixin(body, env, "hide"))
            case Freeze(psi, body):
                return eval_freeze(psi, self._mixin(body, env, "freeze"))
            case Close(body):
                return self.close(self._mixin(body, env, "close"))
            case Project(body, name):
                return self.eval_project(self._mixin(body, env, "projection"), name)
            case IdentRef(ident):
                raise UnresolvedComponent(f"component {ident} has no location (is the mixin closed?)")
            case NameRef(name):
                raise UnresolvedComponent(f"name '{name}' is unresolved")
        raise TypeError(f"not an expression: {e!r}")

    def _mixin(self, e, env, op):
        v = self.eval(e, env)
        if not isinstance(v, MixinStructureValue):
            raise CoreTypeError(f"{op} expects a mixin, got {type_name(v)}")
        return v

    def apply(self, f, arg):
        if isinstance(f, Closure):
            env = f.env if f.param is None else {**f.env, f.param: arg}
            return self.eval(f.body, env)
        if isinstance(f, Builtin):
            return self.effects.call(f.name, arg, self.apply)
        raise CoreTypeError(f"cannot apply a value of type {type_name(f)}")

    def _binop(self, op, left, right, env):
        a = self.eval(left, env)
        if op in ("&&", "||"):
            if not isinstance(a, bool):
                raise CoreTypeError(f"{op} expects bools, got {type_name(a)}")
            if (op == "&&") != a:
                return a
            b = self.eval(right, env)
            if not isinstance(b, bool):
                raise CoreTypeError(f"{op} expects bools, got {type_name(b)}")
            return b
        b = self.eval(right, env)
        if op in ("+", "-", "*", "/", "mod"):
            if not (_is_int(a) and _is_int(b)):
                raise CoreTypeError(f"{op} expects ints, got {type_name(a)} and {type_name(b)}")
            if op in ("/", "mod") and b == 0:
                raise CoreTypeError("division by zero")
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            q = _int_div(a, b)
            return q if op == "/" else a - b * q
        if op == "^":
            if not (isinstance(a, str) and isinstance(b, str)):
                raise CoreTypeError(f"^ expects strings, got {type_name(a)} and {type_name(b)}")
            return a + b
        if type_name(a) != type_name(b):
            raise CoreTypeError(f"cannot compare {type_name(a)} with {type_name(b)}")
        if isinstance(a, (Closure, Builtin, MixinStructureValue)):
            raise CoreTypeError(f"cannot compare values of type {type_name(a)}")
        if op == "=":
            return a == b
        if op == "<>":
            return a != b
        if not (_is_int(a) or isinstance(a, str)):
            raise CoreTypeError(f"{op} expects ints or strings, got {type_name(a)}")
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b

    # --- Mixin forms needing the evaluator ---
    def eval_struct(self, lit):
        v = structure_of(lit, self.literal_constraint(lit))
        return alpha_refresh(v) if self.refresh_literals else v

    def close(self, v):
        if self.variant is Variant.EAGER:
            return self.eval_close_eager(v)
        return self.eval_close(v)

    def eval_close(self, v):
        return eval_close(self.heap, v)

    def eval_close_eager(self, v):
        closed = eval_close(self.heap, v)
        for ref in closed.binding.values():
            self.eval_loc(ref.loc)
        return closed

    def eval_project(self, v, name):
        if name not in v.output:
            raise UnknownProjection(f"the mixin does not export '{name}' (exports: {', '.join(v.output_names())})")
        x = v.output[name]
        if x not in v.binding:
            raise UnresolvedComponent(f"'{name}' is a deferred component")
        body = v.binding[x]
        if free_idents(body) or free_names(body):
            raise UnresolvedComponent(f"'{name}' refers to components of an open mixin")
        return self.eval(body, EMPTY_ENV)

    def eval_loc(self, loc):
        obj = self.heap.read(loc)
        if isinstance(obj, HeapValue):
            return obj.value
        if isinstance(obj, ErrorSentinel):
            if obj.tag is SentinelTag.CONSTRAINT:
                raise ConstraintViolation(f"{loc} was demanded against the declared evaluation order")
            raise CyclicDependency(f"{loc} depends on itself")
        self.heap.force_counts[loc] += 1
        if self.variant is Variant.CBN:
            # Re-evaluated on every access; no blackhole, so self-cycles diverge
            return self.eval(obj.expr, EMPTY_ENV)
        self.heap.blackhole(loc, SentinelTag.CYCLE)
        value = self.eval(obj.expr, EMPTY_ENV)
        self.heap.memoize(loc, value)
        return value

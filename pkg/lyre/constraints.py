# Evaluation-order constraints: global constraints over locations, and strategies.
#
# A strategy decides which local constraint a structure literal carries
# (annotate), what a closed mixin keeps (mu) and what a sum adds
# (nu). Presets are looked up by name through a small registry so the
# CLI can offer every registered strategy.
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

from .ast import (
    EMPTY_CONSTRAINT, AtomMode, LocalConstraint, Sort, external, internal, ordinary,
)
from .errors import StrategyRestriction, UnhousedAtom

logger = logging.getLogger(__name__)


# ==========================================
# GLOBAL CONSTRAINT
# ==========================================

@dataclass
class GlobalConstraint:
    # Ordering edges (before, after) and pending trigger sets over locations
    theta: set = field(default_factory=set)
    delta: set = field(default_factory=set)

    def add(self, theta=(), delta=()):
        self.theta.update(theta)
        self.delta.update(frozenset(group) for group in delta if group)

    def predecessors(self, loc):
        return sorted(before for before, after in self.theta if after == loc)

    def trigger_set(self, loc):
        # The pending trigger set holding loc, or None
        holding = [group for group in self.delta if loc in group]
        if not holding:
            return None
        return min(holding, key=lambda group: sorted(group))

    def consume_edge(self, before, after):
        self.theta.discard((before, after))

    def consume_trigger(self, group):
        self.delta.discard(group)

    def render(self):
        lines = [f"{before} -> {after}" for before, after in sorted(self.theta)]
        for group in sorted(self.delta, key=sorted):
            lines.append("{" + ", ".join(str(loc) for loc in sorted(group)) + "}")
        return lines


def _locate(atom, l, l_int, l_ext):
    table = {AtomMode.ORDINARY: l, AtomMode.INTERNAL: l_int, AtomMode.EXTERNAL: l_ext}[atom.mode]
    if atom.ident not in table:
        raise UnhousedAtom(f"constraint atom '{atom}' has no location")
    return table[atom.ident]


def instantiate(theta, l, l_int, l_ext):
    # Map every atom of theta to its location; pairs are mapped pointwise
    return {(_locate(a, l, l_int, l_ext), _locate(b, l, l_int, l_ext)) for a, b in theta}


def instantiate_delta(delta, l, l_int, l_ext):
    return {frozenset(_locate(a, l, l_int, l_ext) for a in group) for group in delta}


# ==========================================
# STRATEGIES
# ==========================================

def _no_check(*args):
    pass


def _empty_mu(ids, constraint):
    return EMPTY_CONSTRAINT


def _union_nu(ids1, c1, ids2, c2, sealed=frozenset()):
    return c1.union(c2)


@dataclass(frozen=True)
class Strategy:
    name: str
    # Struct literal -> LocalConstraint computed by the strategy itself
    annotate: Callable
    mu: Callable = _empty_mu
    # nu(ids1, c1, ids2, c2, sealed): sealed holds the identifiers of closed operands
    nu: Callable = _union_nu
    # Fragment restrictions; raise StrategyRestriction
    check_literal: Callable = _no_check
    check_sum: Callable = _no_check
    description: Optional[str] = None

    def literal_constraint(self, lit):
        # The program-wide wrapper structure is never annotated
        if lit.implicit:
            return lit.constraint
        return self.annotate(lit).union(lit.constraint)


def _core(idents):
    return [x for x in idents if x.sort is Sort.CORE]


def _components(lit):
    return [*lit.input, *lit.binding]


def _ext_edges(sources, targets):
    return {(ordinary(x), external(y)) for x in _core(sources) for y in targets}


def _top_down(defined):
    return {(ordinary(x), ordinary(y)) for x, y in combinations(_core(defined), 2)}


def _core_first(defined):
    # A core component precedes every later component, sub-mixins included
    defined = list(defined)
    return {
        (ordinary(x), ordinary(y))
        for i, x in enumerate(defined) if x.sort is Sort.CORE
        for y in defined[i + 1:]
    }


# --- pure-lazy ---

def preset_pure_lazy():
    return Strategy(
        "pure-lazy",
        annotate=lambda lit: EMPTY_CONSTRAINT,
        description="only the program's own annotations order evaluation",
    )


# --- recmod ---

def _recmod_annotate(lit):
    everything = _components(lit)
    return LocalConstraint(_core_first(lit.binding) | _ext_edges(everything, everything))


def _recmod_nu(ids1, c1, ids2, c2, sealed=frozenset()):
    # A closed operand's components were ordered when it was closed
    everything = sorted(ids1 | ids2, key=lambda x: x.uid)
    sources = [x for x in everything if x not in sealed]
    return LocalConstraint(_ext_edges(sources, everything)).union(c1).union(c2)


def preset_recmod():
    return Strategy(
        "recmod",
        annotate=_recmod_annotate,
        nu=_recmod_nu,
        description="preceding core components run first; a mixin is fully evaluated before outside access",
    )


# --- objinit ---

def _objinit_annotate(lit):
    everything = _components(lit)
    theta = {(ordinary(x), external(y)) for x in everything for y in everything}
    theta |= {(ordinary(x), internal(y)) for x in everything for y in everything}
    delta = {frozenset(ordinary(x) for x in everything)} if everything else set()
    return LocalConstraint(theta, delta)


def _objinit_nu(ids1, c1, ids2, c2, sealed=frozenset()):
    cross = {(ordinary(x), ordinary(y)) for x in ids1 for y in ids2}
    union = ids1 | ids2
    delta = {frozenset(ordinary(x) for x in union)} if union else set()
    return LocalConstraint(c1.theta | c2.theta | cross, delta)


def _objinit_check_literal(lit):
    nested = [x for x in _components(lit) if x.sort is Sort.MIXIN]
    if nested:
        raise StrategyRestriction(
            f"objinit classes cannot contain sub-mixins ({', '.join(x.base for x in nested)})"
        )


def _objinit_check_sum(v1, v2):
    if v1.closed or v2.closed:
        raise StrategyRestriction("objinit only sums open mixins")


def preset_objinit():
    return Strategy(
        "objinit",
        annotate=_objinit_annotate,
        nu=_objinit_nu,
        check_literal=_objinit_check_literal,
        check_sum=_objinit_check_sum,
        description="class-style initialization: superclass fields first, all fields at once",
    )


# --- trigger-topdown ---

def _trigger_annotate(lit):
    defined = list(lit.binding)
    delta = {frozenset(ordinary(x) for x in defined)} if defined else set()
    return LocalConstraint(_top_down(defined), delta)


def preset_trigger_topdown():
    return Strategy(
        "trigger-topdown",
        annotate=_trigger_annotate,
        description="top-down core order; the first access evaluates the whole mixin",
    )


# --- lazy-record ---

def _lazy_record_annotate(lit):
    everything = _components(lit)
    return LocalConstraint({(ordinary(x), external(y)) for x in everything for y in everything})


def _lazy_record_nu(ids1, c1, ids2, c2, sealed=frozenset()):
    union = ids1 | ids2
    cross = {(ordinary(x), external(y)) for x in union - sealed for y in union}
    return LocalConstraint(cross).union(c1).union(c2)


def preset_lazy_record():
    return Strategy(
        "lazy-record",
        annotate=_lazy_record_annotate,
        nu=_lazy_record_nu,
        description="every component is evaluated before any outside access",
    )


# ==========================================
# REGISTRY
# ==========================================

_REGISTRY = {}


def register_strategy(name, factory):
    if name in _REGISTRY:
        logger.info("[Strategy] replacing '%s'", name)
    _REGISTRY[name] = factory


def get_strategy(name):
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown strategy '{name}' (known: {', '.join(strategy_names())})") from None


def strategy_names():
    return sorted(_REGISTRY)


register_strategy("pure-lazy", preset_pure_lazy)
register_strategy("recmod", preset_recmod)
register_strategy("objinit", preset_objinit)
register_strategy("trigger-topdown", preset_trigger_topdown)
register_strategy("lazy-record", preset_lazy_record)

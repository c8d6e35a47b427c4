# Identifiers, names, locations, expressions and mixin structure values.
#
# Identifiers are alpha-convertible (they carry a globally unique uid);
# names are the external labels used by projection, rename, hide and freeze
# and are never converted. Every node is a frozen dataclass.
import itertools
import threading
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Mapping, Optional

from .errors import CompositionUndefined, DisjointnessViolation


# ==========================================
# IDENTIFIERS, NAMES, LOCATIONS
# ==========================================

class Sort(str, Enum):
    CORE = "core"
    MIXIN = "mixin"


@dataclass(frozen=True)
class Ident:
    base: str
    uid: int
    sort: Sort = Sort.CORE

    def __str__(self):
        return f"{self.base}/{self.uid}"


_uid_lock = threading.Lock()
_uid_counter = itertools.count()


def fresh_ident(base, sort=Sort.CORE):
    # Return an identifier with a uid never issued before in this process
    with _uid_lock:
        uid = next(_uid_counter)
    return Ident(base, uid, Sort(sort))


@dataclass(frozen=True)
class Name:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("a name must be a non-empty string")

    def __str__(self):
        return self.text


@dataclass(frozen=True, order=True)
class Loc:
    index: int

    def __str__(self):
        return f"l{self.index}"


# ==========================================
# CONSTRAINT SYNTAX
# ==========================================

class AtomMode(str, Enum):
    ORDINARY = "ord"
    INTERNAL = "int"
    EXTERNAL = "ext"


@dataclass(frozen=True)
class ConstraintAtom:
    ident: Ident
    mode: AtomMode = AtomMode.ORDINARY

    def __str__(self):
        if self.mode is AtomMode.ORDINARY:
            return str(self.ident)
        return f"{self.mode.value} {self.ident}"


def ordinary(x):
    return ConstraintAtom(x, AtomMode.ORDINARY)


def internal(x):
    return ConstraintAtom(x, AtomMode.INTERNAL)


def external(x):
    return ConstraintAtom(x, AtomMode.EXTERNAL)


@dataclass(frozen=True)
class LocalConstraint:
    # Ordering pairs theta plus trigger sets delta over one structure
    theta: frozenset = frozenset()
    delta: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "theta", frozenset(self.theta))
        object.__setattr__(self, "delta", frozenset(frozenset(s) for s in self.delta))
        for group in self.delta:
            for atom in group:
                if atom.mode is not AtomMode.ORDINARY:
                    raise ValueError(f"trigger sets name components only, got '{atom}'")

    def union(self, other):
        return LocalConstraint(self.theta | other.theta, self.delta | other.delta)

    def idents(self):
        found = {a.ident for pair in self.theta for a in pair}
        found.update(a.ident for group in self.delta for a in group)
        return found

    def rename(self, renaming):
        def move(atom):
            return ConstraintAtom(renaming.get(atom.ident, atom.ident), atom.mode)
        return LocalConstraint(
            frozenset((move(a), move(b)) for a, b in self.theta),
            frozenset(frozenset(move(a) for a in group) for group in self.delta),
        )

    def is_empty(self):
        return not self.theta and not self.delta


EMPTY_CONSTRAINT = LocalConstraint()


# ==========================================
# EXPRESSIONS
# ==========================================

class Expr:
    # Base class of every expression node
    __slots__ = ()


# --- Core forms ---

@dataclass(frozen=True)
class Lit(Expr):
    value: object


@dataclass(frozen=True)
class ListLit(Expr):
    items: tuple


@dataclass(frozen=True)
class TupleLit(Expr):
    items: tuple


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class Lam(Expr):
    # None for the unit and wildcard patterns
    param: Optional[str]
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Let(Expr):
    name: str
    value: Expr
    body: Expr


@dataclass(frozen=True)
class Seq(Expr):
    first: Expr
    second: Expr


@dataclass(frozen=True)
class Deref(Expr):
    target: Expr


@dataclass(frozen=True)
class Assign(Expr):
    target: Expr
    value: Expr


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class BuiltinRef(Expr):
    name: str


# --- Mixin forms ---

@dataclass(frozen=True)
class Struct(Expr):
    input: Mapping
    output: Mapping
    binding: Mapping
    constraint: LocalConstraint = EMPTY_CONSTRAINT
    # Surface annotation and anonymous names, consumed by desugaring
    annotation: object = None
    anonymous: tuple = ()
    # The structure wrapping a whole program
    implicit: bool = False


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Rename(Expr):
    phi1: tuple
    body: Expr
    phi2: tuple


@dataclass(frozen=True)
class Hide(Expr):
    name: Name
    body: Expr


@dataclass(frozen=True)
class Freeze(Expr):
    psi: tuple
    body: Expr


@dataclass(frozen=True)
class Close(Expr):
    body: Expr


@dataclass(frozen=True)
class Project(Expr):
    body: Expr
    name: Name


@dataclass(frozen=True)
class IdentRef(Expr):
    ident: Ident


@dataclass(frozen=True)
class NameRef(Expr):
    name: Name


@dataclass(frozen=True)
class LocRef(Expr):
    loc: Loc


MIXIN_FORMS = (Struct, Sum, Rename, Hide, Freeze, Close)


# ==========================================
# GENERIC TRAVERSAL
# ==========================================

def _map_value(value, fn):
    if isinstance(value, Expr):
        return fn(value)
    if isinstance(value, tuple):
        items = tuple(_map_value(v, fn) for v in value)
        return value if all(a is b for a, b in zip(items, value)) else items
    if isinstance(value, Mapping):
        items = {k: _map_value(v, fn) for k, v in value.items()}
        return value if all(items[k] is value[k] for k in value) else items
    return value


def _iter_value(value):
    if isinstance(value, Expr):
        yield value
    elif isinstance(value, tuple):
        for v in value:
            yield from _iter_value(v)
    elif isinstance(value, Mapping):
        for v in value.values():
            yield from _iter_value(v)


def children(e):
    # Direct sub-expressions of e in field order
    for f in fields(e):
        yield from _iter_value(getattr(e, f.name))


def transform(e, visit):
    # Rebuild e bottom-up; visit may return a replacement node or None
    out = visit(e)
    if out is not None:
        return out
    changes = {}
    for f in fields(e):
        old = getattr(e, f.name)
        new = _map_value(old, lambda child: transform(child, visit))
        if new is not old:
            changes[f.name] = new
    return replace(e, **changes) if changes else e


def walk(e):
    yield e
    for child in children(e):
        yield from walk(child)


def subst(e, mapping):
    # Replace every IdentRef(x) with x in mapping by mapping[x]
    if not mapping:
        return e

    def visit(node):
        if isinstance(node, IdentRef) and node.ident in mapping:
            return mapping[node.ident]
        return None

    return transform(e, visit)


def free_idents(e):
    if isinstance(e, IdentRef):
        return {e.ident}
    if isinstance(e, Struct):
        inner = set()
        for body in e.binding.values():
            inner |= free_idents(body)
        return inner - set(e.input) - set(e.binding)
    found = set()
    for child in children(e):
        found |= free_idents(child)
    return found


def free_names(e):
    return {node.name for node in walk(e) if isinstance(node, NameRef)}


# ==========================================
# FINITE MAPS
# ==========================================

def map_union(f, g):
    overlap = set(f) & set(g)
    if overlap:
        shown = ", ".join(sorted(str(k) for k in overlap))
        raise DisjointnessViolation(f"domains overlap on {shown}")
    merged = dict(f)
    merged.update(g)
    return merged


def map_compose(outer, inner):
    # Return outer . inner; defined only when range(inner) is within dom(outer)
    result = {}
    for key, mid in inner.items():
        if mid not in outer:
            raise CompositionUndefined(f"'{mid}' (image of '{key}') is outside the mapping's domain")
        result[key] = outer[mid]
    return result


# ==========================================
# STRUCTURE VALUES
# ==========================================

@dataclass(frozen=True)
class MixinStructureValue:
    input: Mapping
    output: Mapping
    binding: Mapping
    constraint: LocalConstraint = EMPTY_CONSTRAINT
    # Set by close; the objinit strategy rejects sums over closed operands
    closed: bool = field(default=False, compare=False)

    def identifiers(self):
        return set(self.input) | set(self.binding)

    def output_names(self):
        return sorted(name.text for name in self.output)

    def __str__(self):
        return f"<mixin: {','.join(self.output_names())}>"


def structure_of(lit, constraint=None):
    # The value a structure literal evaluates to
    return MixinStructureValue(
        dict(lit.input),
        dict(lit.output),
        dict(lit.binding),
        lit.constraint if constraint is None else constraint,
    )


def alpha_refresh(s):
    # Rename every identifier of s to a fresh one of the same base and sort
    renaming = {x: fresh_ident(x.base, x.sort) for x in [*s.input, *s.binding]}
    refs = {old: IdentRef(new) for old, new in renaming.items()}
    return MixinStructureValue(
        {renaming[x]: name for x, name in s.input.items()},
        {name: renaming.get(x, x) for name, x in s.output.items()},
        {renaming[x]: subst(body, refs) for x, body in s.binding.items()},
        s.constraint.rename(renaming),
        s.closed,
    )


def check_wellformed(s):
    # List every violated structure invariant; empty when s is well formed
    problems = []
    overlap = set(s.input) & set(s.binding)
    if overlap:
        problems.append(f"deferred and defined identifiers overlap: {sorted(map(str, overlap))}")
    universe = s.identifiers()
    for name, x in s.output.items():
        if x not in universe:
            problems.append(f"output '{name}' points outside the structure ({x})")
    for x, body in s.binding.items():
        names = free_names(body)
        if names:
            problems.append(f"body of {x} mentions names {sorted(n.text for n in names)}")
    stray = s.constraint.idents() - universe
    if stray:
        problems.append(f"constraint mentions foreign identifiers {sorted(map(str, stray))}")
    return problems

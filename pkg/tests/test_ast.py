import pytest

from lyre.ast import (
    EMPTY_CONSTRAINT, BinOp, IdentRef, Lit, LocalConstraint, Name, Sort, Struct, alpha_refresh,
    check_wellformed, external, fresh_ident, free_idents, map_compose, map_union, ordinary,
    structure_of, subst,
)
from lyre.errors import CompositionUndefined, DisjointnessViolation


def _counter_structure():
    # { val step : int  let base = 1  let next = base + step }
    step, base, nxt = fresh_ident("step"), fresh_ident("base"), fresh_ident("next")
    lit = Struct(
        {step: Name("step")},
        {Name("base"): base, Name("next"): nxt},
        {base: Lit(1), nxt: BinOp("+", IdentRef(base), IdentRef(step))},
        LocalConstraint({(ordinary(base), external(nxt))}),
    )
    return structure_of(lit), (step, base, nxt)


def test_fresh_identifiers_are_unique():
    a, b = fresh_ident("x"), fresh_ident("x")
    assert a != b
    assert a.base == b.base == "x"
    assert fresh_ident("m", Sort.MIXIN).sort is Sort.MIXIN


def test_empty_name_is_rejected():
    with pytest.raises(ValueError):
        Name("")


def test_trigger_sets_only_hold_ordinary_atoms():
    x = fresh_ident("x")
    with pytest.raises(ValueError):
        LocalConstraint(delta={frozenset({external(x)})})


def test_map_union_requires_disjoint_domains():
    assert map_union({1: "a"}, {2: "b"}) == {1: "a", 2: "b"}
    with pytest.raises(DisjointnessViolation):
        map_union({1: "a"}, {1: "b"})


def test_map_compose():
    assert map_compose({"b": "c"}, {"a": "b"}) == {"a": "c"}
    with pytest.raises(CompositionUndefined):
        map_compose({"b": "c"}, {"a": "z"})


def test_subst_replaces_identifier_references():
    x = fresh_ident("x")
    e = BinOp("+", IdentRef(x), Lit(2))
    assert subst(e, {x: Lit(40)}) == BinOp("+", Lit(40), Lit(2))
    assert subst(e, {}) is e


def test_free_idents_skip_structure_binders():
    s, (step, base, nxt) = _counter_structure()
    outer = fresh_ident("outer")
    lit = Struct({}, {}, {base: BinOp("+", IdentRef(base), IdentRef(outer))})
    assert free_idents(lit) == {outer}
    assert free_idents(s.binding[nxt]) == {base, step}


def test_alpha_refresh_renames_every_identifier():
    s, (step, base, nxt) = _counter_structure()
    fresh = alpha_refresh(s)
    assert not (fresh.identifiers() & s.identifiers())
    assert fresh.output_names() == s.output_names()
    assert list(fresh.input.values()) == [Name("step")]
    new_next = fresh.output[Name("next")]
    assert free_idents(fresh.binding[new_next]) == {fresh.output[Name("base")], *fresh.input}
    (pair,) = fresh.constraint.theta
    assert pair[0].ident == fresh.output[Name("base")]
    assert check_wellformed(fresh) == []


def test_check_wellformed_reports_foreign_outputs():
    s, _ = _counter_structure()
    broken = structure_of(Struct({}, {Name("ghost"): fresh_ident("ghost")}, {}))
    assert check_wellformed(s) == []
    assert any("ghost" in problem for problem in check_wellformed(broken))


def test_structure_value_renders_sorted_outputs():
    s, _ = _counter_structure()
    assert str(s) == "<mixin: base,next>"
    assert s.constraint != EMPTY_CONSTRAINT

import pytest

from lyre.ast import Lit
from lyre.corpus import discover
from lyre.errors import LyreError
from lyre.parser import load, parse
from lyre.pretty import render_expr, render_program
from lyre.values import UNIT

from .conftest import run_source


def _sources():
    found = []
    for path, _ in discover():
        with open(path, encoding="utf-8") as handle:
            source = handle.read()
        try:
            parse(source)
        except LyreError:
            continue
        found.append(pytest.param(source, id=path.rsplit("/", 1)[-1]))
    return found


@pytest.mark.parametrize("source", _sources())
def test_render_is_a_fixpoint_of_parse(source):
    once = render_program(parse(source))
    assert render_program(parse(once)) == once


def test_rendered_program_behaves_the_same():
    source = 'mixin M = { let c = print "hi"; -2 } let main = close(M).c * 3'
    rendered = render_program(parse(source))
    assert run_source(rendered).value == run_source(source).value == -6


@pytest.mark.parametrize("value, text", [
    (True, "true"),
    ("a\"b", '"a\\"b"'),
    (UNIT, "()"),
])
def test_literals(value, text):
    assert render_expr(Lit(value)) == text


def test_annotations_survive_rendering():
    source = "mixin M = { let a = 1 let b = 2 constraint (a, ext b) trigger {a, b} } let main = close(M).a"
    rendered = render_program(parse(source))
    assert "constraint (a, ext b)" in rendered
    assert "trigger {a, b}" in rendered
    program, _ = load(rendered)
    assert program.has_annotations

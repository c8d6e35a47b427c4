# Core-language runtime values and their rendering.
from dataclasses import dataclass
from typing import Mapping

from .ast import Expr, MixinStructureValue


class Unit:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "()"


UNIT = Unit()


@dataclass(frozen=True)
class ListValue:
    items: tuple


@dataclass(frozen=True)
class TupleValue:
    items: tuple


@dataclass(frozen=True, eq=False)
class Closure:
    param: object
    body: Expr
    env: Mapping


@dataclass(frozen=True)
class Builtin:
    name: str


@dataclass(frozen=True)
class RefCell:
    cell_id: int


def render_value(v):
    # Render a value the way the CLI prints results
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if v is UNIT:
        return "()"
    if isinstance(v, ListValue):
        return "[" + "; ".join(render_value(item) for item in v.items) + "]"
    if isinstance(v, TupleValue):
        return "(" + ", ".join(render_value(item) for item in v.items) + ")"
    if isinstance(v, (Closure, Builtin)):
        return "<fun>"
    if isinstance(v, RefCell):
        return "<ref>"
    if isinstance(v, MixinStructureValue):
        return str(v)
    return str(v)


def display(v):
    # print shows strings raw
    return v if isinstance(v, str) else render_value(v)


def type_name(v):
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, str):
        return "string"
    if v is UNIT:
        return "unit"
    if isinstance(v, ListValue):
        return "list"
    if isinstance(v, TupleValue):
        return "tuple"
    if isinstance(v, (Closure, Builtin)):
        return "function"
    if isinstance(v, RefCell):
        return "ref"
    if isinstance(v, MixinStructureValue):
        return "mixin"
    return type(v).__name__

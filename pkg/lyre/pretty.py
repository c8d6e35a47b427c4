# Render parsed programs back to surface syntax.
#
# Every compound sub-expression is parenthesized, so the output re-parses to
# the same tree; types are printed as any since the parser discards them.
import json

from .ast import (
    App, Assign, BinOp, Close, Deref, Freeze, Hide, If, Lam, Let, ListLit, Lit, Neg, Project,
    Rename, Seq, Sort, Struct, Sum, TupleLit, Var, AtomMode,
)
from .values import UNIT

_ATOMIC = (Lit, Var, ListLit, TupleLit, Struct, Close, Hide, Freeze, Rename)


def _wrap(e):
    text = render_expr(e)
    return text if isinstance(e, _ATOMIC) else f"({text})"


def _literal(value):
    if value is UNIT:
        return "()"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    return str(value)


def _param(param):
    return "()" if param is None else param


def _cref(ref):
    mode, text = ref
    return text if mode is AtomMode.ORDINARY else f"{mode.value} {text}"


def render_struct(lit):
    items = []
    for x in lit.input:
        items.append(f"val mixin {x.base}" if x.sort is Sort.MIXIN else f"val {x.base} : any")
    for x, body in lit.binding.items():
        if x.base == "_":
            items.append(f"let _ = {render_expr(body)}")
        elif x.sort is Sort.MIXIN:
            items.append(f"mixin {x.base} = {render_expr(body)}")
        else:
            items.append(f"let {x.base} = {render_expr(body)}")
    if lit.annotation is not None:
        if lit.annotation.pairs:
            items.append("constraint " + " ".join(
                f"({_cref(a)}, {_cref(b)})" for a, b in lit.annotation.pairs
            ))
        if lit.annotation.triggers:
            items.append("trigger " + " ".join(
                "{" + ", ".join(group) + "}" for group in lit.annotation.triggers
            ))
    if not items:
        return "{ }"
    return "{ " + " ".join(items) + " }"


def render_expr(e):
    match e:
        case Lit(value):
            return _literal(value)
        case Var(name):
            return name
        case ListLit(items):
            return "[" + "; ".join(_wrap(item) for item in items) + "]"
        case TupleLit(items):
            return "(" + ", ".join(_wrap(item) for item in items) + ")"
        case BinOp(op, left, right):
            return f"{_wrap(left)} {op} {_wrap(right)}"
        case Neg(operand):
            return f"-{_wrap(operand)}"
        case If(cond, then, orelse):
            return f"if {_wrap(cond)} then {_wrap(then)} else {_wrap(orelse)}"
        case Lam(param, body):
            return f"fun {_param(param)} -> {_wrap(body)}"
        case App(fn, arg):
            return f"{_wrap(fn)} {_wrap(arg)}"
        case Let(name, value, body):
            return f"let {name} = {_wrap(value)} in {_wrap(body)}"
        case Seq(first, second):
            return f"{_wrap(first)}; {_wrap(second)}"
        case Deref(target):
            return f"!{_wrap(target)}"
        case Assign(target, value):
            return f"{_wrap(target)} := {_wrap(value)}"
        case Struct():
            return render_struct(e)
        case Sum(left, right):
            return f"{_wrap(left)} <- {_wrap(right)}"
        case Rename(phi1, body, phi2):
            first = ", ".join(f"{a} |-> {b}" for a, b in phi1)
            second = ", ".join(f"{a} |-> {b}" for a, b in phi2)
            return f"rename[({first}), ({second})]({render_expr(body)})"
        case Hide(name, body):
            return f"hide[{name}]({render_expr(body)})"
        case Freeze(psi, body):
            tyings = ", ".join(f"{name} |-> {_wrap(rhs)}" for name, rhs in psi)
            return f"freeze[{tyings}]({render_expr(body)})"
        case Close(body):
            return f"close({render_expr(body)})"
        case Project(body, name):
            return f"{_wrap(body)}.{name}"
    raise TypeError(f"cannot render {type(e).__name__} in surface syntax")


def render_program(program):
    lines = []
    for binding in program.bindings:
        keyword = "mixin" if binding.kind == "mixin" else "let"
        lines.append(f"{keyword} {binding.name} = {render_expr(binding.expr)}")
    lines.append(f"let main = {render_expr(program.main)}")
    return "\n".join(lines) + "\n"

# Surface syntax: lark grammar, tree-to-AST transformer and desugaring.
#
# parse turns program text into a Program whose expressions still
# refer to variables by their surface spelling. desugar resolves every
# spelling to a local variable, a component identifier, a builtin or (inside
# freeze tyings) a name, compiles constraint annotations, hides anonymous
# components and wraps the whole program into one closed structure.
import logging
from ast import literal_eval
from dataclasses import dataclass, field

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from . import config
from .ast import (
    MIXIN_FORMS, App, Assign, AtomMode, BinOp, BuiltinRef, Close, ConstraintAtom, Deref, Freeze,
    Hide, IdentRef, If, Lam, Let, ListLit, Lit, LocalConstraint, Name, NameRef, Neg, Project,
    Rename, Seq, Sort, Struct, Sum, TupleLit, Var, fresh_ident, transform,
)
from .effects import BUILTIN_NAMES
from .errors import DuplicateBinder, LyreError, ParseError, UnknownConstraintTarget
from .values import UNIT

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: decl*

decl: "mixin" NAME "=" expr                     -> mixin_decl
    | "let" NAME param* "=" expr                -> let_decl

?expr: stmt
     | stmt ";" expr                            -> seq

?stmt: "let" NAME param* "=" expr "in" expr     -> let_in
     | "fun" param+ "->" expr                   -> lam
     | "if" expr "then" stmt "else" stmt        -> if_expr
     | assign

?assign: disj ":=" disj                         -> assign_expr
       | disj

?disj: disj "||" conj                           -> or_expr
     | conj

?conj: conj "&&" cmp                            -> and_expr
     | cmp

?cmp: mixsum "=" mixsum                         -> eq
    | mixsum "<>" mixsum                        -> ne
    | mixsum "<" mixsum                         -> lt
    | mixsum "<=" mixsum                        -> le
    | mixsum ">" mixsum                         -> gt
    | mixsum ">=" mixsum                        -> ge
    | mixsum

?mixsum: arith "<-" mixsum                      -> mix_sum
       | arith

?arith: arith "+" term                          -> add
      | arith "-" term                          -> sub
      | arith "^" term                          -> concat
      | term

?term: term "*" unary                           -> mul
     | term "/" unary                           -> div
     | term "mod" unary                         -> mod
     | unary

?unary: "-" unary                               -> neg
      | app

?app: app postfix                               -> apply
    | postfix

?postfix: postfix "." NAME                      -> project
        | "!" postfix                           -> deref
        | atom

?atom: INT                                      -> int_lit
     | STRING                                   -> str_lit
     | "true"                                   -> true_lit
     | "false"                                  -> false_lit
     | "(" ")"                                  -> unit_lit
     | "(" expr ")"
     | "(" expr ("," expr)+ ")"                 -> tuple_lit
     | "[" (stmt (";" stmt)*)? "]"              -> list_lit
     | NAME                                     -> var
     | structure
     | "close" "(" expr ")"                     -> close
     | "hide" "[" NAME ("," NAME)* "]" "(" expr ")"   -> hide
     | "freeze" "[" tyings "]" "(" expr ")"     -> freeze
     | "rename" "[" "(" maplist ")" "," "(" maplist ")" "]" "(" expr ")"  -> rename

tyings: (tying ("," tying)*)?
tying: NAME "|->" stmt
maplist: (mapping ("," mapping)*)?
mapping: NAME "|->" NAME

param: NAME                                     -> name_param
     | "(" ")"                                  -> unit_param
     | "_"                                      -> wild_param

structure: "{" item* "}"

item: "val" NAME ":" type                       -> val_item
    | "val" "mixin" NAME                        -> val_mixin_item
    | "let" NAME param* "=" expr                -> let_item
    | "let" "_" "=" expr                        -> anon_item
    | "mixin" NAME "=" expr                     -> mixin_item
    | "constraint" pair+                        -> constraint_item
    | "trigger" tset+                           -> trigger_item

pair: "(" cref "," cref ")"
cref: NAME                                      -> ord_ref
    | "int" NAME                                -> int_ref
    | "ext" NAME                                -> ext_ref
tset: "{" NAME ("," NAME)* "}"

// Types are parsed and discarded
type: type_prod ("->" type_prod)*
type_prod: type_app ("*" type_app)*
type_app: type_atom NAME*
type_atom: NAME
         | "int"
         | "(" type ")"

NAME: /[A-Za-z_][A-Za-z0-9_']*/
INT: /[0-9]+/
STRING: ESCAPED_STRING
COMMENT: /\(\*[\s\S]*?\*\)/

%import common.ESCAPED_STRING
%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(GRAMMAR, parser="lalr", maybe_placeholders=False)


# ==========================================
# PROGRAM AND ANNOTATION TYPES
# ==========================================

@dataclass(frozen=True)
class SurfaceConstraintAnnotation:
    # ((mode, binder), (mode, binder)) pairs and tuples of binders
    pairs: tuple = ()
    triggers: tuple = ()


@dataclass(frozen=True)
class Binding:
    name: str
    expr: object
    kind: str  # "mixin" or "let"


@dataclass(frozen=True)
class Program:
    bindings: tuple
    main: object
    has_annotations: bool = field(default=False, compare=False)


def _curry(params, body):
    for param in reversed(params):
        body = Lam(param, body)
    return body


def _sort_of(body):
    return Sort.MIXIN if isinstance(body, MIXIN_FORMS) else Sort.CORE


@v_args(inline=True)
class _ToAst(Transformer):
    def __init__(self):
        super().__init__()
        self.annotated = False

    # --- Program ---
    def start(self, *decls):
        if not decls or decls[-1].kind != "let" or decls[-1].name != config.MAIN_NAME:
            raise ParseError(f"a program must end with `let {config.MAIN_NAME} = ...`")
        seen = set()
        for decl in decls:
            if decl.name in seen:
                raise DuplicateBinder(f"top-level binder '{decl.name}' is defined twice")
            seen.add(decl.name)
        return Program(tuple(decls[:-1]), decls[-1].expr, self.annotated)

    def mixin_decl(self, name, body):
        return Binding(str(name), body, "mixin")

    def let_decl(self, name, *rest):
        return Binding(str(name), _curry(rest[:-1], rest[-1]), "let")

    # --- Core ---
    def seq(self, first, second):
        return Seq(first, second)

    def let_in(self, name, *rest):
        *params, value, body = rest
        return Let(str(name), _curry(params, value), body)

    def lam(self, *rest):
        return _curry(rest[:-1], rest[-1])

    def if_expr(self, cond, then, orelse):
        return If(cond, then, orelse)

    def assign_expr(self, target, value):
        return Assign(target, value)

    def or_expr(self, a, b):
        return BinOp("||", a, b)

    def and_expr(self, a, b):
        return BinOp("&&", a, b)

    def eq(self, a, b):
        return BinOp("=", a, b)

    def ne(self, a, b):
        return BinOp("<>", a, b)

    def lt(self, a, b):
        return BinOp("<", a, b)

    def le(self, a, b):
        return BinOp("<=", a, b)

    def gt(self, a, b):
        return BinOp(">", a, b)

    def ge(self, a, b):
        return BinOp(">=", a, b)

    def add(self, a, b):
        return BinOp("+", a, b)

    def sub(self, a, b):
        return BinOp("-", a, b)

    def concat(self, a, b):
        return BinOp("^", a, b)

    def mul(self, a, b):
        return BinOp("*", a, b)

    def div(self, a, b):
        return BinOp("/", a, b)

    def mod(self, a, b):
        return BinOp("mod", a, b)

    def neg(self, operand):
        return Neg(operand)

    def apply(self, fn, arg):
        return App(fn, arg)

    def deref(self, target):
        return Deref(target)

    def int_lit(self, token):
        return Lit(int(token))

    def str_lit(self, token):
        return Lit(literal_eval(str(token)))

    def true_lit(self):
        return Lit(True)

    def false_lit(self):
        return Lit(False)

    def unit_lit(self):
        return Lit(UNIT)

    def tuple_lit(self, *items):
        return TupleLit(tuple(items))

    def list_lit(self, *items):
        return ListLit(tuple(items))

    def var(self, token):
        return Var(str(token))

    def name_param(self, token):
        return str(token)

    def unit_param(self):
        return None

    def wild_param(self):
        return None

    # --- Mixin operators ---
    def mix_sum(self, left, right):
        return Sum(left, right)

    def project(self, body, name):
        return Project(body, Name(str(name)))

    def close(self, body):
        return Close(body)

    def hide(self, *args):
        body = args[-1]
        for name in args[:-1]:
            body = Hide(Name(str(name)), body)
        return body

    def freeze(self, tyings, body):
        return Freeze(tyings, body)

    def tyings(self, *items):
        return tuple(items)

    def tying(self, name, rhs):
        return (Name(str(name)), rhs)

    def rename(self, phi1, phi2, body):
        return Rename(phi1, body, phi2)

    def maplist(self, *items):
        return tuple(items)

    def mapping(self, source, target):
        return (Name(str(source)), Name(str(target)))

    # --- Structure literals ---
    def val_item(self, name, _type=None):
        return ("val", str(name), Sort.CORE)

    def val_mixin_item(self, name):
        return ("val", str(name), Sort.MIXIN)

    def let_item(self, name, *rest):
        return ("let", str(name), _curry(rest[:-1], rest[-1]))

    def anon_item(self, body):
        return ("anon", body)

    def mixin_item(self, name, body):
        return ("mixin", str(name), body)

    def constraint_item(self, *pairs):
        return ("constraint", pairs)

    def pair(self, before, after):
        return (before, after)

    def ord_ref(self, name):
        return (AtomMode.ORDINARY, str(name))

    def int_ref(self, name):
        return (AtomMode.INTERNAL, str(name))

    def ext_ref(self, name):
        return (AtomMode.EXTERNAL, str(name))

    def trigger_item(self, *groups):
        return ("trigger", groups)

    def tset(self, *names):
        return tuple(str(n) for n in names)

    def structure(self, *items):
        inputs, outputs, binding = {}, {}, {}
        defined, deferred = set(), set()
        anonymous, pairs, triggers = [], [], []
        for item in items:
            tag = item[0]
            if tag == "val":
                _, text, sort = item
                if text in deferred:
                    raise DuplicateBinder(f"deferred component '{text}' is declared twice")
                deferred.add(text)
                inputs[fresh_ident(text, sort)] = Name(text)
            elif tag in ("let", "mixin"):
                _, text, body = item
                if text in defined:
                    raise DuplicateBinder(f"defined component '{text}' is declared twice")
                defined.add(text)
                x = fresh_ident(text, Sort.MIXIN if tag == "mixin" else _sort_of(body))
                binding[x] = body
                outputs[Name(text)] = x
            elif tag == "anon":
                hidden = Name(f"{config.HIDDEN_PREFIX}{len(anonymous) + 1}")
                x = fresh_ident("_", _sort_of(item[1]))
                binding[x] = item[1]
                outputs[hidden] = x
                anonymous.append(hidden)
            elif tag == "constraint":
                pairs.extend(item[1])
            else:
                triggers.extend(item[1])
        annotation = None
        if pairs or triggers:
            annotation = SurfaceConstraintAnnotation(tuple(pairs), tuple(triggers))
            self.annotated = True
        return Struct(inputs, outputs, binding, annotation=annotation, anonymous=tuple(anonymous))


def parse(source):
    # Parse program text into a Program
    try:
        tree = _parser.parse(source)
    except UnexpectedEOF as exc:
        raise ParseError("unexpected end of input", exc.line, exc.column) from None
    except UnexpectedCharacters as exc:
        raise ParseError(f"unexpected character {source[exc.pos_in_stream]!r}", exc.line, exc.column) from None
    except UnexpectedInput as exc:
        token = getattr(exc, "token", None)
        raise ParseError(f"unexpected token {token!s}", exc.line, exc.column) from None
    try:
        program = _ToAst().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, LyreError):
            raise exc.orig_exc from None
        raise
    logger.debug("[Parse] %d top-level bindings", len(program.bindings) + 1)
    return program


# ==========================================
# DESUGARING
# ==========================================

_LOCAL = object()


def _lookup(name, scope, in_psi):
    for frame in reversed(scope):
        if name in frame:
            target = frame[name]
            return Var(name) if target is _LOCAL else IdentRef(target)
    if name in BUILTIN_NAMES:
        return BuiltinRef(name)
    if in_psi:
        return NameRef(Name(name))
    raise ParseError(f"unbound identifier '{name}'")


def _compile_annotation(lit):
    table = {x.base: x for x in lit.input}
    table.update({x.base: x for x in lit.binding if x.base != "_"})

    def atom(ref):
        mode, text = ref
        if text not in table:
            raise UnknownConstraintTarget(f"'{text}' is not a component of the annotated structure")
        return ConstraintAtom(table[text], mode)

    annotation = lit.annotation
    theta = frozenset((atom(a), atom(b)) for a, b in annotation.pairs)
    delta = frozenset(
        frozenset(atom((AtomMode.ORDINARY, text)) for text in group) for group in annotation.triggers
    )
    return LocalConstraint(theta, delta)


def _desugar_struct(lit, scope, in_psi):
    frame = {x.base: x for x in lit.input}
    frame.update({x.base: x for x in lit.binding if x.base != "_"})
    inner = scope + (frame,)
    binding = {x: _resolve(body, inner, in_psi) for x, body in lit.binding.items()}
    constraint = lit.constraint if lit.annotation is None else _compile_annotation(lit)
    result = Struct(dict(lit.input), dict(lit.output), binding, constraint, implicit=lit.implicit)
    for hidden in lit.anonymous:
        result = Hide(hidden, result)
    return result


def _resolve(e, scope, in_psi=False):
    def visit(node):
        if isinstance(node, Var):
            return _lookup(node.name, scope, in_psi)
        if isinstance(node, Lam):
            body_scope = scope + ({node.param: _LOCAL},) if node.param else scope
            return Lam(node.param, _resolve(node.body, body_scope, in_psi))
        if isinstance(node, Let):
            value = _resolve(node.value, scope, in_psi)
            return Let(node.name, value, _resolve(node.body, scope + ({node.name: _LOCAL},), in_psi))
        if isinstance(node, Struct):
            return _desugar_struct(node, scope, in_psi)
        if isinstance(node, Freeze):
            # Free spellings inside a tying denote output names of the frozen mixin
            psi = tuple((name, _resolve(rhs, (), True)) for name, rhs in node.psi)
            return Freeze(psi, _resolve(node.body, scope, in_psi))
        return None

    return transform(e, visit)


def desugar(program):
    # Turn a parsed program into one expression: close the top level, project main
    decls = [*program.bindings, Binding(config.MAIN_NAME, program.main, "let")]
    outputs, binding = {}, {}
    for decl in decls:
        sort = Sort.MIXIN if decl.kind == "mixin" else _sort_of(decl.expr)
        x = fresh_ident(decl.name, sort)
        binding[x] = decl.expr
        outputs[Name(decl.name)] = x
    top = Struct({}, outputs, binding, implicit=True)
    expr = Project(Close(_resolve(top, ())), Name(config.MAIN_NAME))
    logger.debug("[Parse] desugared %d components into the top-level structure", len(binding))
    return expr


def load(source):
    # Parse and desugar in one step; returns (program, expr)
    program = parse(source)
    return program, desugar(program)

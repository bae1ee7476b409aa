"""Expression AST and declarations, with smart constructors for derived forms."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Span
from .types import Type


class Expr:
    __slots__ = ()


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var(Expr):
    name: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Ctor(Expr):
    name: str
    args: tuple[Expr, ...] = ()
    span: Span | None = _span()


@dataclass(frozen=True)
class Fun(Expr):
    param: str
    ptype: Type
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Pair(Expr):
    left: Expr
    right: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Proj(Expr):
    index: int  # 1 or 2
    expr: Expr
    span: Span | None = _span()


class Pattern:
    __slots__ = ()


@dataclass(frozen=True)
class PAny(Pattern):
    """Wildcard or variable pattern; `name` is None for `_`."""

    name: str | None = None


@dataclass(frozen=True)
class PCtor(Pattern):
    ctor: str
    binders: tuple[str | None, ...] = ()


@dataclass(frozen=True)
class PPair(Pattern):
    left: str | None
    right: str | None


@dataclass(frozen=True)
class Match(Expr):
    scrutinee: Expr
    branches: tuple[tuple[Pattern, Expr], ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class Let(Expr):
    name: str
    bound: Expr
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class LetRec(Expr):
    name: str
    fn: Fun
    ret_type: Type
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Eq(Expr):
    left: Expr
    right: Expr
    span: Span | None = _span()


# ---------------------------------------------------------------- declarations


@dataclass(frozen=True)
class TypeDecl:
    name: str
    ctors: tuple[tuple[str, tuple[Type, ...]], ...]
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FunDecl:
    """`let [rec] name (x : T) ... : R = body`; `params` may be empty for constants."""

    name: str
    params: tuple[tuple[str, Type], ...]
    ret_type: Type
    body: Expr
    recursive: bool = False
    span: Span | None = field(default=None, compare=False)

    @property
    def type(self) -> Type:
        from .types import arrow

        return arrow(*[t for _, t in self.params], self.ret_type)

    def as_expr(self) -> Expr:
        """The declaration as a closed expression (recursion via LetRec)."""
        if not self.params:
            return self.body
        body = self.body
        for name, t in reversed(self.params[1:]):
            body = Fun(name, t, body)
        fn = Fun(self.params[0][0], self.params[0][1], body)
        if not self.recursive:
            return fn
        from .types import arrow

        ret = arrow(*[t for _, t in self.params[1:]], self.ret_type)
        return LetRec(self.name, fn, ret, Var(self.name))


@dataclass(frozen=True)
class SigDecl:
    name: str
    members: tuple[tuple[str, Type], ...]
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    sig_name: str | None
    concrete: Type
    defs: tuple[FunDecl, ...]
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SpecDecl:
    quantifiers: tuple[tuple[str, Type], ...]
    body: Expr
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Program:
    types: tuple[TypeDecl, ...]
    prelude: tuple[FunDecl, ...]
    sigs: tuple[SigDecl, ...]
    module: ModuleDecl
    spec: SpecDecl
    # declaration order of prelude items, needed for faithful printing
    order: tuple[str, ...] = ()


# ---------------------------------------------------------------- builders

TRUE_E = Ctor("True")
FALSE_E = Ctor("False")


def if_(c: Expr, t: Expr, e: Expr) -> Expr:
    return Match(c, ((PCtor("True"), t), (PCtor("False"), e)))


def and_(a: Expr, b: Expr) -> Expr:
    return if_(a, b, FALSE_E)


def or_(a: Expr, b: Expr) -> Expr:
    return if_(a, TRUE_E, b)


def not_(a: Expr) -> Expr:
    return if_(a, FALSE_E, TRUE_E)


def implies_(a: Expr, b: Expr) -> Expr:
    return if_(a, b, TRUE_E)


def nat_lit(n: int) -> Expr:
    e: Expr = Ctor("Z")
    for _ in range(n):
        e = Ctor("S", (e,))
    return e


def apps(fn: Expr, *args: Expr) -> Expr:
    for a in args:
        fn = App(fn, a)
    return fn


def bool_view(e: Expr):
    """Recognise the desugared boolean forms. Returns (kind, operands) or None."""
    if not isinstance(e, Match) or len(e.branches) != 2:
        return None
    (p1, b1), (p2, b2) = e.branches
    if not (isinstance(p1, PCtor) and p1.ctor == "True" and isinstance(p2, PCtor) and p2.ctor == "False"):
        return None
    c = e.scrutinee
    if b1 == FALSE_E and b2 == TRUE_E:
        return "not", (c,)
    if b2 == FALSE_E:
        return "and", (c, b1)
    if b1 == TRUE_E:
        return "or", (c, b2)
    if b2 == TRUE_E:
        return "implies", (c, b1)
    return "if", (c, b1, b2)


def nat_view(e: Expr) -> int | None:
    n = 0
    while isinstance(e, Ctor) and e.name == "S" and len(e.args) == 1:
        n += 1
        e = e.args[0]
    if isinstance(e, Ctor) and e.name == "Z" and not e.args:
        return n
    return None


# ---------------------------------------------------------------- metrics


def expr_size(e: Expr) -> int:
    """AST node count; the size reported for synthesized invariants."""
    if isinstance(e, Var):
        return 1
    if isinstance(e, Ctor):
        return 1 + sum(expr_size(a) for a in e.args)
    if isinstance(e, Fun):
        return 1 + expr_size(e.body)
    if isinstance(e, App):
        return 1 + expr_size(e.fn) + expr_size(e.arg)
    if isinstance(e, (Pair, Eq)):
        return 1 + expr_size(e.left) + expr_size(e.right)
    if isinstance(e, Proj):
        return 1 + expr_size(e.expr)
    if isinstance(e, Match):
        return 1 + expr_size(e.scrutinee) + sum(expr_size(b) for _, b in e.branches)
    if isinstance(e, Let):
        return 1 + expr_size(e.bound) + expr_size(e.body)
    if isinstance(e, LetRec):
        return 1 + expr_size(e.fn) + expr_size(e.body)
    raise TypeError(f"not an expression: {e!r}")


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Ctor):
        return set().union(*(free_vars(a) for a in e.args)) if e.args else set()
    if isinstance(e, Fun):
        return free_vars(e.body) - {e.param}
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, (Pair, Eq)):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Proj):
        return free_vars(e.expr)
    if isinstance(e, Match):
        out = free_vars(e.scrutinee)
        for p, b in e.branches:
            out |= free_vars(b) - pattern_binders(p)
        return out
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    if isinstance(e, LetRec):
        return (free_vars(e.fn) | free_vars(e.body)) - {e.name}
    raise TypeError(f"not an expression: {e!r}")


def pattern_binders(p: Pattern) -> set[str]:
    if isinstance(p, PAny):
        return {p.name} if p.name else set()
    if isinstance(p, PCtor):
        return {b for b in p.binders if b}
    if isinstance(p, PPair):
        return {b for b in (p.left, p.right) if b}
    return set()

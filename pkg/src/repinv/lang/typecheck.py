"""Simple type checking for the object language."""
from __future__ import annotations

from .errors import ConstructorArityMismatch, NonExhaustiveMatch, TypeMismatch, UnboundVariable
from .syntax import App, Ctor, Eq, Expr, Fun, Let, LetRec, Match, PAny, PCtor, Pair, PPair, Proj, Var
from .types import (
    BOOL,
    Datatypes,
    TAbstract,
    TArrow,
    TNamed,
    TProd,
    Type,
    contains_abstract,
    is_arrow_free,
    substitute_abstract,
)


class Checker:
    """Type checker over a datatype registry.

    ``concrete`` set means we are inside the module: the abstract type is an alias
    for it. Outside (prelude, spec) the abstract type is opaque.
    """

    def __init__(self, dts: Datatypes, concrete: Type | None = None):
        self.dts = dts
        self.concrete = concrete

    def norm(self, t: Type) -> Type:
        if self.concrete is not None:
            return substitute_abstract(t, self.concrete)
        return t

    def check(self, ctx: dict[str, Type], e: Expr) -> Type:
        return self._infer(ctx, e)

    def expect(self, ctx, e: Expr, t: Type) -> None:
        got = self._infer(ctx, e)
        if got != self.norm(t):
            raise TypeMismatch(f"expected {self.norm(t)}, found {got}", e.span)

    def _infer(self, ctx: dict[str, Type], e: Expr) -> Type:
        if isinstance(e, Var):
            t = ctx.get(e.name)
            if t is None:
                raise UnboundVariable(f"unbound variable `{e.name}`", e.span)
            return self.norm(t)
        if isinstance(e, Ctor):
            c = self.dts.ctors.get(e.name)
            if c is None:
                raise UnboundVariable(f"unknown constructor `{e.name}`", e.span)
            if len(e.args) != c.arity:
                raise ConstructorArityMismatch(
                    f"constructor `{e.name}` expects {c.arity} argument(s), got {len(e.args)}", e.span
                )
            for a, ft in zip(e.args, c.fields):
                got = self._infer(ctx, a)
                if got != ft:
                    raise TypeMismatch(f"constructor `{e.name}` field expects {ft}, found {got}", a.span)
            return TNamed(c.adt)
        if isinstance(e, Fun):
            pt = self.norm(e.ptype)
            self.dts.check_type(pt, allow_abstract=True, span=e.span)
            body = self._infer({**ctx, e.param: pt}, e.body)
            return TArrow(pt, body)
        if isinstance(e, App):
            ft = self._infer(ctx, e.fn)
            if not isinstance(ft, TArrow):
                raise TypeMismatch(f"applying a non-function of type {ft}", e.span)
            at = self._infer(ctx, e.arg)
            if at != ft.dom:
                raise TypeMismatch(f"argument expects {ft.dom}, found {at}", e.arg.span or e.span)
            return ft.cod
        if isinstance(e, Pair):
            return TProd(self._infer(ctx, e.left), self._infer(ctx, e.right))
        if isinstance(e, Proj):
            t = self._infer(ctx, e.expr)
            if not isinstance(t, TProd):
                raise TypeMismatch(f"projection from a non-pair of type {t}", e.span)
            return t.left if e.index == 1 else t.right
        if isinstance(e, Eq):
            lt = self._infer(ctx, e.left)
            rt = self._infer(ctx, e.right)
            if lt != rt:
                raise TypeMismatch(f"comparing {lt} with {rt}", e.span)
            if not is_arrow_free(lt):
                raise TypeMismatch("equality on functions is not supported", e.span)
            if contains_abstract(lt):
                raise TypeMismatch("equality on the abstract type is not available", e.span)
            return BOOL
        if isinstance(e, Let):
            bt = self._infer(ctx, e.bound)
            return self._infer({**ctx, e.name: bt}, e.body)
        if isinstance(e, LetRec):
            ft = TArrow(self.norm(e.fn.ptype), self.norm(e.ret_type))
            inner = {**ctx, e.name: ft}
            got = self._infer(inner, e.fn)
            if got != ft:
                raise TypeMismatch(f"recursive function declared {ft} but has type {got}", e.span)
            return self._infer(inner, e.body)
        if isinstance(e, Match):
            return self._match(ctx, e)
        raise TypeError(f"not an expression: {e!r}")

    def _match(self, ctx, e: Match) -> Type:
        st = self._infer(ctx, e.scrutinee)
        if isinstance(st, TAbstract):
            raise TypeMismatch("cannot inspect a value of the abstract type", e.span)
        if not e.branches:
            if isinstance(st, TNamed) and not self.dts.adt(st.name).ctors:
                raise TypeMismatch("empty match has no result type", e.span)
            raise NonExhaustiveMatch("match has no branches", e.span)
        seen: set[str] = set()
        catch_all = False
        result: Type | None = None
        for pat, body in e.branches:
            local = dict(ctx)
            if isinstance(pat, PAny):
                catch_all = True
                if pat.name:
                    local[pat.name] = st
            elif isinstance(pat, PCtor):
                if not isinstance(st, TNamed):
                    raise TypeMismatch(f"constructor pattern on a value of type {st}", e.span)
                c = self.dts.ctors.get(pat.ctor)
                if c is None:
                    raise UnboundVariable(f"unknown constructor `{pat.ctor}`", e.span)
                if c.adt != st.name:
                    raise TypeMismatch(f"constructor `{pat.ctor}` does not belong to {st}", e.span)
                if len(pat.binders) != c.arity:
                    raise ConstructorArityMismatch(
                        f"pattern `{pat.ctor}` binds {len(pat.binders)} of {c.arity} field(s)", e.span
                    )
                seen.add(pat.ctor)
                for b, ft in zip(pat.binders, c.fields):
                    if b:
                        local[b] = ft
            elif isinstance(pat, PPair):
                if not isinstance(st, TProd):
                    raise TypeMismatch(f"pair pattern on a value of type {st}", e.span)
                catch_all = True
                if pat.left:
                    local[pat.left] = st.left
                if pat.right:
                    local[pat.right] = st.right
            bt = self._infer(local, body)
            if result is None:
                result = bt
            elif bt != result:
                raise TypeMismatch(f"match branches disagree: {result} vs {bt}", body.span or e.span)
        if not catch_all:
            if not isinstance(st, TNamed):
                raise NonExhaustiveMatch(f"match on {st} needs a catch-all branch", e.span)
            missing = [c.name for c in self.dts.adt(st.name).ctors if c.name not in seen]
            if missing:
                raise NonExhaustiveMatch(f"match is missing constructor(s): {', '.join(missing)}", e.span)
        return result


def typecheck(ctx: dict[str, Type], e: Expr, dts: Datatypes | None = None, concrete: Type | None = None) -> Type:
    return Checker(dts or Datatypes(), concrete).check(ctx, e)

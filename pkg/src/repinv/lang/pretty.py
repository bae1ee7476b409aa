"""Surface-syntax printing. Output reparses to the same AST."""
from __future__ import annotations

from .syntax import (
    App,
    Ctor,
    Eq,
    Expr,
    Fun,
    FunDecl,
    Let,
    LetRec,
    Match,
    PAny,
    PCtor,
    Pair,
    PPair,
    Program,
    Proj,
    Var,
    bool_view,
    nat_view,
)
from .types import TAbstract, TArrow, TNamed, TProd, Type

# precedence levels, loosest first
_TOP, _IMPL, _OR, _AND, _CMP, _APP, _ATOM = range(7)


def pretty_type(t: Type) -> str:
    if isinstance(t, TAbstract):
        return "t"
    if isinstance(t, TNamed):
        return t.name
    if isinstance(t, TProd):
        left = pretty_type(t.left)
        if isinstance(t.left, (TProd, TArrow)):
            left = f"({left})"
        right = pretty_type(t.right)
        if isinstance(t.right, TArrow):
            right = f"({right})"
        return f"{left} * {right}"
    if isinstance(t, TArrow):
        dom = pretty_type(t.dom)
        if isinstance(t.dom, TArrow):
            dom = f"({dom})"
        return f"{dom} -> {pretty_type(t.cod)}"
    raise TypeError(t)


def _field_type(t: Type) -> str:
    s = pretty_type(t)
    return f"({s})" if isinstance(t, (TProd, TArrow)) else s


def _binder(b):
    return b if b else "_"


def _pattern(p) -> str:
    if isinstance(p, PAny):
        return _binder(p.name)
    if isinstance(p, PPair):
        return f"({_binder(p.left)}, {_binder(p.right)})"
    if isinstance(p, PCtor):
        if p.ctor in ("True", "False") and not p.binders:
            return p.ctor.lower()
        if not p.binders:
            return p.ctor
        if len(p.binders) == 1:
            return f"{p.ctor} {_binder(p.binders[0])}"
        return f"{p.ctor} ({', '.join(_binder(b) for b in p.binders)})"
    raise TypeError(p)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


def pretty_expr(e: Expr, prec: int = _TOP) -> str:
    n = nat_view(e)
    if n is not None:
        return str(n)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Ctor):
        if e.name in ("True", "False") and not e.args:
            return e.name.lower()
        if not e.args:
            return e.name
        if len(e.args) == 1:
            return _paren(f"{e.name} {pretty_expr(e.args[0], _ATOM)}", prec > _APP)
        inner = ", ".join(pretty_expr(a) for a in e.args)
        return _paren(f"{e.name} ({inner})", prec > _APP)
    if isinstance(e, Pair):
        return f"({pretty_expr(e.left)}, {pretty_expr(e.right)})"
    if isinstance(e, Proj):
        fn = "fst" if e.index == 1 else "snd"
        return _paren(f"{fn} {pretty_expr(e.expr, _ATOM)}", prec > _APP)
    if isinstance(e, App):
        return _paren(f"{pretty_expr(e.fn, _APP)} {pretty_expr(e.arg, _ATOM)}", prec > _APP)
    if isinstance(e, Eq):
        return _paren(f"{pretty_expr(e.left, _APP)} = {pretty_expr(e.right, _APP)}", prec > _CMP)
    if isinstance(e, Fun):
        return _paren(f"fun ({e.param} : {pretty_type(e.ptype)}) -> {pretty_expr(e.body)}", prec > _TOP)
    if isinstance(e, Let):
        return _paren(f"let {e.name} = {pretty_expr(e.bound)} in {pretty_expr(e.body)}", prec > _TOP)
    if isinstance(e, LetRec):
        params = []
        fn: Expr = e.fn
        params.append(f"({fn.param} : {pretty_type(fn.ptype)})")
        text = (
            f"let rec {e.name} {' '.join(params)} : {pretty_type(e.ret_type)} = "
            f"{pretty_expr(fn.body)} in {pretty_expr(e.body)}"
        )
        return _paren(text, prec > _TOP)
    if isinstance(e, Match):
        view = bool_view(e)
        if view is not None:
            kind, ops = view
            if kind == "not":
                return _paren(f"not {pretty_expr(ops[0], _ATOM)}", prec > _APP)
            if kind == "and":
                return _paren(f"{pretty_expr(ops[0], _CMP)} && {pretty_expr(ops[1], _AND)}", prec > _AND)
            if kind == "or":
                return _paren(f"{pretty_expr(ops[0], _AND)} || {pretty_expr(ops[1], _OR)}", prec > _OR)
            if kind == "implies":
                return _paren(f"{pretty_expr(ops[0], _OR)} ==> {pretty_expr(ops[1], _IMPL)}", prec > _IMPL)
            c, a, b = ops
            return _paren(f"if {pretty_expr(c)} then {pretty_expr(a)} else {pretty_expr(b)}", prec > _TOP)
        arms = " ".join(f"| {_pattern(p)} -> {pretty_expr(b, _IMPL)}" for p, b in e.branches)
        # a trailing match would swallow following arms, so always parenthesise nested ones
        return _paren(f"match {pretty_expr(e.scrutinee)} with {arms}", prec > _TOP)
    raise TypeError(f"not an expression: {e!r}")


def pretty_fundecl(d: FunDecl) -> str:
    kw = "let rec" if d.recursive else "let"
    params = "".join(f" ({n} : {pretty_type(t)})" for n, t in d.params)
    return f"{kw} {d.name}{params} : {pretty_type(d.ret_type)} =\n  {pretty_expr(d.body)}"


def pretty_program(p: Program) -> str:
    out = []
    types = {d.name: d for d in p.types}
    funs = {d.name: d for d in p.prelude}
    sigs = {d.name: d for d in p.sigs}
    order = p.order or tuple([*types, *funs, *sigs])
    for key in order:
        if key in types:
            d = types[key]
            if not d.ctors:
                out.append(f"type {d.name}")
                continue
            arms = []
            for cname, fields in d.ctors:
                if fields:
                    arms.append(f"{cname} of {' * '.join(_field_type(f) for f in fields)}")
                else:
                    arms.append(cname)
            out.append(f"type {d.name} = {' | '.join(arms)}")
        elif key in funs:
            out.append(pretty_fundecl(funs[key]))
        elif key in sigs:
            s = sigs[key]
            members = "\n".join(f"  val {n} : {pretty_type(t)}" for n, t in s.members)
            out.append(f"module type {s.name} = sig\n  type t\n{members}\nend")
    m = p.module
    header = f"module {m.name}" + (f" : {m.sig_name}" if m.sig_name else "") + " = struct"
    body = "\n".join("  " + pretty_fundecl(d).replace("\n", "\n  ") for d in m.defs)
    out.append(f"{header}\n  type t = {pretty_type(m.concrete)}\n{body}\nend")
    qs = " ".join(f"({n} : {pretty_type(t)})" for n, t in p.spec.quantifiers)
    out.append(f"spec forall {qs} .\n  {pretty_expr(p.spec.body)}")
    return "\n\n".join(out) + "\n"

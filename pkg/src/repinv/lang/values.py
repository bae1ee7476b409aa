"""Runtime value representation.

Constructor values are tuples ``(tag, *fields)``; pairs are ``(",", left, right)``;
functions are plain Python callables. Tuples give structural equality and hashing
for free, which the example sets and memo tables rely on.
"""
from __future__ import annotations

from .errors import SizeOfClosure
from .types import ADT, Datatypes, TAbstract, TArrow, TNamed, TProd, Type

PAIR_TAG = ","

TRUE = ("True",)
FALSE = ("False",)
Z = ("Z",)


def vbool(b: bool):
    return TRUE if b else FALSE


def is_true(v) -> bool:
    return v[0] == "True"


def nat(n: int):
    v = Z
    for _ in range(n):
        v = ("S", v)
    return v


def nat_to_int(v) -> int | None:
    n = 0
    while isinstance(v, tuple) and v and v[0] == "S":
        n += 1
        v = v[1]
    if v == Z:
        return n
    return None


def pair(a, b):
    return (PAIR_TAG, a, b)


def is_function(v) -> bool:
    return callable(v)


def value_size(v) -> int:
    if callable(v):
        raise SizeOfClosure("closures have no size")
    n = 1
    for child in v[1:]:
        n += value_size(child)
    return n


def subvalues_at(v, t: Type, target: Type, dts: Datatypes, strict=True):
    """All subvalues of ``v : t`` whose static type is ``target``, outermost first."""
    out = []

    def walk(u, ut, top):
        if ut == target and not (top and strict):
            out.append(u)
        if isinstance(ut, TProd):
            walk(u[1], ut.left, False)
            walk(u[2], ut.right, False)
        elif isinstance(ut, TNamed):
            c = dts.ctor(u[0])
            for f, ft in zip(u[1:], c.fields):
                walk(f, ft, False)

    walk(v, t, True)
    return out


def collect_at_abstract(v, t: Type) -> list:
    """Components of ``v`` sitting at abstract positions of ``t``."""
    if isinstance(t, TAbstract):
        return [v]
    if isinstance(t, TProd):
        return collect_at_abstract(v[1], t.left) + collect_at_abstract(v[2], t.right)
    return []


def _list_view(v, adt: ADT):
    """Elements of a cons-list shaped value, or None if the ADT is not list-like."""
    if len(adt.ctors) != 2:
        return None
    nil, cons = adt.ctors
    if nil.arity != 0 or cons.arity != 2 or cons.fields[1] != TNamed(adt.name):
        return None
    items = []
    while v[0] == cons.name:
        items.append(v[1])
        v = v[2]
    return items


def show(v, dts: Datatypes | None = None) -> str:
    """Human-readable rendering with decimal nats and ``[a; b]`` list sugar."""
    if callable(v):
        expr = getattr(v, "expr", None)
        if expr is not None:
            from .pretty import pretty_expr

            return pretty_expr(expr)
        return "<fun>"
    tag = v[0]
    if tag == PAIR_TAG:
        return f"({show(v[1], dts)}, {show(v[2], dts)})"
    if tag in ("Z", "S"):
        n = nat_to_int(v)
        if n is not None:
            return str(n)
    if tag == "True":
        return "true"
    if tag == "False":
        return "false"
    if dts is not None and tag in dts.ctors:
        adt = dts.adt(dts.ctor(tag).adt)
        items = _list_view(v, adt)
        if items is not None:
            return "[" + "; ".join(show(x, dts) for x in items) + "]"
    if len(v) == 1:
        return tag
    if len(v) == 2:
        inner = show(v[1], dts)
        if len(v[1]) > 1 and v[1][0] != PAIR_TAG and nat_to_int(v[1]) is None:
            inner = f"({inner})"
        return f"{tag} {inner}"
    return f"{tag} ({', '.join(show(x, dts) for x in v[1:])})"


def check_value_type(v, t: Type, dts: Datatypes, concrete: Type | None = None) -> bool:
    """Does the first-order value ``v`` inhabit ``t``? Abstract positions use ``concrete``."""
    if isinstance(t, TAbstract):
        return concrete is not None and check_value_type(v, concrete, dts, None)
    if isinstance(t, TArrow):
        return callable(v)
    if callable(v) or not isinstance(v, tuple) or not v:
        return False
    if isinstance(t, TProd):
        return (
            v[0] == PAIR_TAG
            and len(v) == 3
            and check_value_type(v[1], t.left, dts, concrete)
            and check_value_type(v[2], t.right, dts, concrete)
        )
    c = dts.ctors.get(v[0])
    if c is None or c.adt != t.name or len(v) - 1 != c.arity:
        return False
    return all(check_value_type(x, ft, dts, concrete) for x, ft in zip(v[1:], c.fields))

"""Deterministic size-ordered enumeration of values and small functions.

Values of a type come out in nondecreasing ``value_size``; within a size,
constructors follow declaration order and children compare left to right by
(size, position in their own stream).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from .lang.syntax import App, Ctor, Expr, Fun, LetRec, Match, PCtor, Pair, PPair, Proj, Var, expr_size
from .lang.types import Datatypes, TAbstract, TArrow, TNamed, TProd, Type, arrow
from .lang.values import PAIR_TAG


class Enumerator:
    """Memoising value enumerator for one datatype registry."""

    def __init__(self, dts: Datatypes | None = None):
        self.dts = dts or Datatypes()
        self._exact: dict[tuple[Type, int], tuple] = {}
        self._min: dict[Type, float] = {}
        self._streams: dict[tuple[Type, int, int], tuple] = {}

    # ------------------------------------------------------------ sizes

    def min_size(self, t: Type) -> float:
        """Smallest value size of ``t``; ``inf`` when uninhabited."""
        if t in self._min:
            return self._min[t]
        if isinstance(t, TProd):
            m = 1 + self.min_size(t.left) + self.min_size(t.right)
            self._min[t] = m
            return m
        if isinstance(t, TNamed):
            self._solve_adt_minima()
            return self._min.get(t, math.inf)
        if isinstance(t, TAbstract):
            raise TypeError("cannot enumerate the abstract type")
        raise TypeError(f"cannot enumerate function type {t}")

    def _solve_adt_minima(self):
        names = list(self.dts.adts)
        best = {n: math.inf for n in names}
        changed = True

        def field_min(ft):
            if isinstance(ft, TNamed):
                return best[ft.name]
            if isinstance(ft, TProd):
                return 1 + field_min(ft.left) + field_min(ft.right)
            return math.inf

        while changed:
            changed = False
            for n in names:
                for c in self.dts.adt(n).ctors:
                    m = 1 + sum(field_min(f) for f in c.fields)
                    if m < best[n]:
                        best[n] = m
                        changed = True
        for n in names:
            self._min[TNamed(n)] = best[n]

    # ------------------------------------------------------------ exact-size groups

    def exact(self, t: Type, n: int) -> tuple:
        key = (t, n)
        got = self._exact.get(key)
        if got is None:
            got = tuple(self._gen(t, n))
            self._exact[key] = got
        return got

    def _gen(self, t: Type, n: int) -> Iterator:
        if n < self.min_size(t):
            return
        if isinstance(t, TProd):
            for left, right in self._seq((t.left, t.right), n - 1):
                yield (PAIR_TAG, left, right)
            return
        for c in self.dts.adt(t.name).ctors:
            if not c.fields:
                if n == 1:
                    yield (c.name,)
                continue
            for children in self._seq(c.fields, n - 1):
                yield (c.name, *children)

    def _seq(self, fields: tuple[Type, ...], total: int) -> Iterator[tuple]:
        """Tuples of children with sizes summing to ``total``, in canonical order."""
        if len(fields) == 1:
            for v in self.exact(fields[0], total):
                yield (v,)
            return
        rest_min = sum(self.min_size(f) for f in fields[1:])
        if rest_min == math.inf:
            return
        lo = self.min_size(fields[0])
        if lo == math.inf:
            return
        for s in range(int(lo), total - int(rest_min) + 1):
            group = self.exact(fields[0], s)
            if not group:
                continue
            tails = None
            for v in group:
                if tails is None:
                    tails = list(self._seq(fields[1:], total - s))
                    if not tails:
                        break
                for tail in tails:
                    yield (v, *tail)

    # ------------------------------------------------------------ streams

    def stream(self, t: Type, max_nodes: int, max_count: int) -> Iterator:
        """Values of ``t`` with at most ``max_nodes`` nodes, at most ``max_count`` of them."""
        count = 0
        if max_count <= 0:
            return
        for n in range(1, max_nodes + 1):
            for v in self.exact(t, n):
                yield v
                count += 1
                if count >= max_count:
                    return

    def sized(self, t: Type, max_nodes: int, max_count: int) -> tuple[tuple[object, int], ...]:
        """Materialised ``stream`` paired with sizes (memoised)."""
        key = (t, max_nodes, max_count)
        got = self._streams.get(key)
        if got is None:
            out = []
            for n in range(1, max_nodes + 1):
                if len(out) >= max_count:
                    break
                for v in self.exact(t, n):
                    out.append((v, n))
                    if len(out) >= max_count:
                        break
            got = tuple(out)
            self._streams[key] = got
        return got

    def values(self, t: Type, max_nodes: int, max_count: int) -> tuple:
        return tuple(v for v, _ in self.sized(t, max_nodes, max_count))


_DEFAULT = Enumerator()


def enum_values(t: Type, max_nodes: int, max_count: int, dts: Datatypes | None = None) -> Iterator:
    """Size-ordered stream of closed values of the arrow-free type ``t``."""
    en = _DEFAULT if dts is None else Enumerator(dts)
    return en.stream(t, max_nodes, max_count)


def count_values(t: Type, max_nodes: int, dts: Datatypes | None = None) -> int:
    en = _DEFAULT if dts is None else Enumerator(dts)
    return sum(len(en.exact(t, n)) for n in range(1, max_nodes + 1))


# ---------------------------------------------------------------- functions


@dataclass(frozen=True)
class FnGrammar:
    """Restricted function grammar used for higher-order arguments."""

    depth: int = 2
    max_count: int = 64
    allow_match: bool = True
    allow_rec: bool = True

    def __post_init__(self):
        if self.depth < 1 or self.max_count < 1:
            raise ValueError("grammar bounds must be positive")


class FunctionEnumerator:
    def __init__(self, enumerator: Enumerator):
        self.en = enumerator
        self.dts = enumerator.dts
        self._fresh = itertools.count()

    def _name(self, base):
        return f"{base}{next(self._fresh)}"

    def _constants(self, t: Type, max_size: int) -> list[Expr]:
        if not _first_order(t):
            return []
        return [_value_expr(v) for v in self.en.stream(t, max_size, 1000)]

    def terms(self, t: Type, env, depth: int, rec=None) -> list[Expr]:
        """Terms of type ``t``; ``env`` is a list of (name, type), ``rec`` (name, arg type, result type)."""
        out: list[Expr] = []
        out.extend(self._constants(t, depth))
        for name, ty in env:
            if ty == t:
                out.append(Var(name))
            if isinstance(ty, TProd):
                if ty.left == t:
                    out.append(Proj(1, Var(name)))
                if ty.right == t:
                    out.append(Proj(2, Var(name)))
        if rec is not None:
            fname, argt, rest = rec
            if rest == t:
                for name, ty in env:
                    if ty == argt and name.startswith("_sub"):
                        out.append(App(Var(fname), Var(name)))
        if depth >= 2:
            if isinstance(t, TNamed):
                for c in self.dts.adt(t.name).ctors:
                    if not c.fields:
                        continue
                    options = [self.terms(f, env, depth - 1, rec) for f in c.fields]
                    for combo in itertools.product(*options):
                        if all(isinstance(a, Ctor) and _ground(a) for a in combo):
                            continue
                        out.append(Ctor(c.name, tuple(combo)))
            elif isinstance(t, TProd):
                ls = self.terms(t.left, env, depth - 1, rec)
                rs = self.terms(t.right, env, depth - 1, rec)
                for a, b in itertools.product(ls, rs):
                    if _ground(a) and _ground(b):
                        continue
                    out.append(Pair(a, b))
        return _dedupe(out)

    def functions(self, params: tuple[Type, ...], cod: Type, grammar: FnGrammar) -> list[Expr]:
        names = [self._name("x") for _ in params]
        env = list(zip(names, params))
        bodies: list[Expr] = list(self.terms(cod, env, grammar.depth))
        if grammar.allow_match and grammar.depth >= 2:
            single = len(params) == 1
            for pname, pt in env:
                if not isinstance(pt, TNamed):
                    continue
                ctors = self.dts.adt(pt.name).ctors
                if not ctors:
                    continue
                fname = self._name("self")
                rec = (fname, pt, cod) if (single and grammar.allow_rec) else None
                arms = []
                for c in ctors:
                    binders = tuple(self._name("_sub" if f == pt else "_f") for f in c.fields)
                    local = env + list(zip(binders, c.fields))
                    arms.append([(PCtor(c.name, binders), b) for b in self.terms(cod, local, grammar.depth - 1, rec)])
                for combo in itertools.product(*arms):
                    body = Match(Var(pname), tuple(combo))
                    uses_rec = rec is not None and any(_mentions(b, fname) for _, b in combo)
                    bodies.append(("rec", fname, body) if uses_rec else body)
                    if len(bodies) > 20 * grammar.max_count:
                        break
        exprs = []
        for body in bodies:
            if isinstance(body, tuple):
                _, fname, inner = body
                fn = Fun(names[0], params[0], inner)
                exprs.append(LetRec(fname, fn, cod, Var(fname)))
                continue
            e = body
            for n, ty in reversed(env):
                e = Fun(n, ty, e)
            exprs.append(e)
        exprs = _dedupe(exprs)
        exprs.sort(key=expr_size)  # stable: generation order breaks ties
        return exprs[: grammar.max_count]


def _mentions(e: Expr, name: str) -> bool:
    from .lang.syntax import free_vars

    return name in free_vars(e)


def _first_order(t: Type) -> bool:
    if isinstance(t, TArrow) or isinstance(t, TAbstract):
        return False
    if isinstance(t, TProd):
        return _first_order(t.left) and _first_order(t.right)
    return True


def _ground(e: Expr) -> bool:
    if isinstance(e, Ctor):
        return all(_ground(a) for a in e.args)
    if isinstance(e, Pair):
        return _ground(e.left) and _ground(e.right)
    return False


def _value_expr(v) -> Expr:
    if v[0] == PAIR_TAG:
        return Pair(_value_expr(v[1]), _value_expr(v[2]))
    return Ctor(v[0], tuple(_value_expr(c) for c in v[1:]))


def _dedupe(items):
    seen = set()
    out = []
    for x in items:
        key = x if not isinstance(x, tuple) else x[2]
        if key in seen:
            continue
        seen.add(key)
        out.append(x)
    return out


def enum_function_exprs(
    dom: Type | tuple[Type, ...], cod: Type, grammar: FnGrammar = FnGrammar(), dts: Datatypes | None = None
) -> list[Expr]:
    """Closed function expressions of type ``dom -> cod`` (or curried over a param tuple)."""
    params = dom if isinstance(dom, tuple) else (dom,)
    en = _DEFAULT if dts is None else Enumerator(dts)
    return FunctionEnumerator(en).functions(params, cod, grammar)


def enum_functions(dom, cod: Type, grammar: FnGrammar = FnGrammar(), dts: Datatypes | None = None, runtime=None):
    """Compiled closures for ``enum_function_exprs``; each carries ``.expr``."""
    from .lang.evaluator import Runtime

    rt = runtime or Runtime()
    out = []
    for e in enum_function_exprs(dom, cod, grammar, dts):
        f = rt.compile(e)
        f.expr = e
        out.append(f)
    return out


def function_type(params: tuple[Type, ...], cod: Type) -> Type:
    return arrow(*params, cod)

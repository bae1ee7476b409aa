"""Fuel-bounded call-by-value evaluation by translation to Python closures.

Each object-language expression becomes a Python expression string that is
compiled once. Function literals become lambdas, matches become conditional
chains over the constructor tag, and every beta or match step pulls one item
from the global fuel iterator; when the iterator runs dry it raises
``FuelExhausted``.
"""
from __future__ import annotations

import itertools
import keyword
import sys
from typing import Callable

from .errors import FuelExhausted, LangError, UnboundVariable
from .syntax import App, Ctor, Eq, Expr, Fun, FunDecl, Let, LetRec, Match, PAny, PCtor, Pair, PPair, Proj, Var
from .values import FALSE, TRUE

DEFAULT_FUEL = 100_000

# Object-level recursion maps onto Python recursion.
if sys.getrecursionlimit() < 8000:
    sys.setrecursionlimit(8000)


def _exhausted(limit):
    raise FuelExhausted(f"evaluation exceeded {limit} steps")
    yield  # pragma: no cover


def _ground(e: Expr) -> bool:
    return isinstance(e, Ctor) and all(_ground(a) for a in e.args)


def _ground_value(e: Ctor):
    return (e.name, *(_ground_value(a) for a in e.args))


class Runtime:
    """Compilation namespace shared by a program's definitions and the predicates built over them."""

    def __init__(self, fuel: int = DEFAULT_FUEL):
        self.fuel = fuel
        self.ns: dict = {"_T": TRUE, "_F": FALSE, "_FUEL": iter(())}
        self.globals: dict[str, tuple[str, int]] = {}
        self._fresh = itertools.count()
        self._consts: dict[tuple, str] = {}

    # ------------------------------------------------------------ naming

    def _name(self, base: str, prefix="v") -> str:
        clean = base.replace("'", "_q")
        if keyword.iskeyword(clean):
            clean += "_"
        return f"{prefix}_{clean}_{next(self._fresh)}"

    def _const(self, value) -> str:
        name = self._consts.get(value)
        if name is None:
            name = f"_c{len(self._consts)}"
            self._consts[value] = name
            self.ns[name] = value
        return name

    # ------------------------------------------------------------ codegen

    def gen(self, e: Expr, env: dict[str, str]) -> str:
        if isinstance(e, Var):
            if e.name in env:
                return env[e.name]
            g = self.globals.get(e.name)
            if g is None:
                raise UnboundVariable(f"unbound variable `{e.name}`", e.span)
            return g[0]
        if isinstance(e, Ctor):
            if _ground(e):
                return self._const(_ground_value(e))
            args = ", ".join(self.gen(a, env) for a in e.args)
            return f"({e.name!r}, {args})"
        if isinstance(e, Fun):
            p = self._name(e.param)
            body = self.gen(e.body, {**env, e.param: p})
            return f"(lambda {p}: next(_FUEL) or {body})"
        if isinstance(e, App):
            return self._gen_app(e, env)
        if isinstance(e, Pair):
            return f"(',', {self.gen(e.left, env)}, {self.gen(e.right, env)})"
        if isinstance(e, Proj):
            return f"{self.gen(e.expr, env)}[{e.index}]"
        if isinstance(e, Eq):
            return f"(_T if {self.gen(e.left, env)} == {self.gen(e.right, env)} else _F)"
        if isinstance(e, Let):
            v = self._name(e.name)
            bound = self.gen(e.bound, env)
            body = self.gen(e.body, {**env, e.name: v})
            return f"(({v} := {bound}), {body})[1]"
        if isinstance(e, LetRec):
            v = self._name(e.name)
            inner = {**env, e.name: v}
            fn = self.gen(e.fn, inner)
            body = self.gen(e.body, inner)
            return f"(({v} := {fn}), {body})[1]"
        if isinstance(e, Match):
            return self._gen_match(e, env)
        raise TypeError(f"not an expression: {e!r}")

    def _gen_app(self, e: App, env) -> str:
        args = []
        head: Expr = e
        while isinstance(head, App):
            args.append(head.arg)
            head = head.fn
        args.reverse()
        code_args = [self.gen(a, env) for a in args]
        if isinstance(head, Var) and head.name not in env and head.name in self.globals:
            _, arity = self.globals[head.name]
            if 0 < arity <= len(args):
                out = f"{self._uncurried(head.name)}({', '.join(code_args[:arity])})"
                for a in code_args[arity:]:
                    out = f"{out}({a})"
                return out
        out = self.gen(head, env)
        for a in code_args:
            out = f"{out}({a})"
        return out

    def _uncurried(self, name: str) -> str:
        return self.globals[name][0] + "_n"

    def _gen_match(self, e: Match, env) -> str:
        m = self._name("m", prefix="")
        scr = f"(next(_FUEL) or ({m} := {self.gen(e.scrutinee, env)}))"
        branches = []
        for pat, body in e.branches:
            local = dict(env)
            test = None
            if isinstance(pat, PAny):
                if pat.name:
                    local[pat.name] = m
            elif isinstance(pat, PPair):
                if pat.left:
                    local[pat.left] = f"{m}[1]"
                if pat.right:
                    local[pat.right] = f"{m}[2]"
            elif isinstance(pat, PCtor):
                test = pat.ctor
                for i, b in enumerate(pat.binders, start=1):
                    if b:
                        local[b] = f"{m}[{i}]"
            branches.append((test, self.gen(body, local)))
            if test is None:
                break
        # the last reachable branch needs no test: the checker proved exhaustiveness
        if len(branches) == 1:
            return f"({scr} and {branches[0][1]})"
        out = branches[-1][1]
        for i in range(len(branches) - 2, -1, -1):
            tag, code = branches[i]
            subject = scr if i == 0 else m
            out = f"({code} if {subject}[0] == {tag!r} else {out})"
        return out

    def _eval_code(self, code: str):
        return eval(compile(code, "<object>", "eval"), self.ns)

    # ------------------------------------------------------------ definitions

    def define(self, decl: FunDecl) -> None:
        """Install a top-level definition (prelude function or module operation)."""
        if not decl.params:
            pyname = self._name(decl.name, prefix="g")
            code = self.gen(decl.body, {})
            value = self.run(lambda: self._eval_code(code))
            self.globals[decl.name] = (pyname, 0)
            self.ns[pyname] = value
            return
        pyname = self._name(decl.name, prefix="g")
        self.globals[decl.name] = (pyname, len(decl.params))
        env = {}
        params = []
        for pname, _ in decl.params:
            p = self._name(pname)
            env[pname] = p
            params.append(p)
        body = self.gen(decl.body, env)
        uncurried = f"(lambda {', '.join(params)}: next(_FUEL) or {body})"
        self.ns[pyname + "_n"] = self._eval_code(uncurried)
        curried = f"{pyname}_n({', '.join(params)})"
        for p in reversed(params):
            curried = f"(lambda {p}: {curried})"
        self.ns[pyname] = self._eval_code(curried)

    def alias(self, name: str, target: str) -> None:
        """Make ``name`` refer to an existing global (used for module re-exports)."""
        self.globals[name] = self.globals[target]

    def lookup(self, name: str):
        return self.ns[self.globals[name][0]]

    def compile(self, e: Expr, params: tuple[str, ...] = (), as_function: bool = False) -> Callable:
        """Compile ``e`` to a Python function of ``params`` (uncurried).

        With no params the expression is evaluated once and its value returned,
        unless ``as_function`` asks for a zero-argument function instead.
        """
        env = {}
        py = []
        for p in params:
            n = self._name(p)
            env[p] = n
            py.append(n)
        body = self.gen(e, env)
        if not params and not as_function:
            return self.run(lambda: self._eval_code(body))
        return self._eval_code(f"(lambda {', '.join(py)}: {body})")

    # ------------------------------------------------------------ running

    def run(self, thunk: Callable[[], object], fuel: int | None = None):
        """Run ``thunk`` with a fresh step budget; nested runs get their own."""
        limit = self.fuel if fuel is None else fuel
        saved = self.ns["_FUEL"]
        self.ns["_FUEL"] = itertools.chain(itertools.repeat(None, limit), _exhausted(limit))
        try:
            return thunk()
        except RecursionError:
            raise FuelExhausted("evaluation exceeded the recursion depth") from None
        finally:
            self.ns["_FUEL"] = saved

    def call(self, fn: Callable, *args, fuel: int | None = None):
        """Apply a curried object-level function to ``args`` under a fresh budget."""

        def thunk():
            out = fn
            for a in args:
                out = out(a)
            return out

        return self.run(thunk, fuel)

    def call_n(self, fn: Callable, *args, fuel: int | None = None):
        """Apply an uncurried compiled function (as returned by ``compile``)."""
        return self.run(lambda: fn(*args), fuel)


def evaluate(e: Expr, runtime: Runtime | None = None, fuel: int | None = None, env: dict | None = None):
    """Evaluate a closed expression (optionally binding ``env`` values)."""
    rt = runtime or Runtime()
    if not env:
        if fuel is not None:
            body = rt.gen(e, {})
            return rt.run(lambda: rt._eval_code(body), fuel)
        return rt.compile(e)
    names = tuple(env)
    fn = rt.compile(e, names)
    return rt.call_n(fn, *[env[n] for n in names], fuel=fuel)


__all__ = ["DEFAULT_FUEL", "Runtime", "evaluate", "LangError"]

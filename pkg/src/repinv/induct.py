"""Conditional inductiveness checking.

``check(P, Q)`` asks whether every operation, when handed abstract values that
satisfy ``P``, only hands back abstract values that satisfy ``Q``. Functions
crossing the boundary are wrapped in contracts: values flowing into the module
are checked against ``P`` (a failure blames the client, so the input is skipped)
and values flowing out are checked against ``Q`` (a failure is a counterexample).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .enumerate import Enumerator, FnGrammar, FunctionEnumerator
from .lang.errors import FuelExhausted, LangError
from .lang.types import TAbstract, TArrow, TProd, Type, contains_abstract, has_positive_abstract, uncurry
from .lang.values import collect_at_abstract, show

# ---------------------------------------------------------------- relations


class SetMembership:
    """``P(v)`` iff ``v`` is one of finitely many values (kept in insertion order)."""

    def __init__(self, values: Iterable = ()):
        self.values = tuple(dict.fromkeys(values))
        self._set = frozenset(self.values)

    def __call__(self, v) -> bool:
        return v in self._set

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"SetMembership({len(self.values)} values)"


class PredicateTest:
    """``P(v)`` iff a predicate accepts ``v``; candidates are drawn by enumeration."""

    def __init__(self, pred: Callable[[object], bool]):
        self.pred = pred

    def __call__(self, v) -> bool:
        try:
            return bool(self.pred(v))
        except FuelExhausted:
            return False

    def __repr__(self):
        return f"PredicateTest({self.pred!r})"


def as_relation(r) -> Callable:
    if isinstance(r, (SetMembership, PredicateTest)):
        return r
    if isinstance(r, (set, frozenset, list, tuple)):
        return SetMembership(r)
    return PredicateTest(r)


# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class Construction:
    """How a value was produced: ``path`` locates it inside the call's output.

    Path steps are ``("proj", 1|2)`` into a product result or ``("crossing", k)``
    for the k-th abstract value the module handed to a client function.
    """

    op: str
    args: tuple
    arg_types: tuple
    path: tuple = ()

    def describe(self, dts=None) -> str:
        parts = []
        for a, t in zip(self.args, self.arg_types):
            if callable(a):
                from .lang.pretty import pretty_expr

                e = getattr(a, "expr", None)
                parts.append(f"({pretty_expr(e)})" if e is not None else "<fun>")
            else:
                parts.append(show(a, dts))
        call = " ".join([self.op, *parts]) if parts else self.op
        for step, k in self.path:
            call = f"{'fst' if k == 1 else 'snd'} ({call})" if step == "proj" else f"crossing {k} of ({call})"
        return call


@dataclass(frozen=True)
class Valid:
    checked: int = 0

    @property
    def valid(self) -> bool:
        return True


@dataclass(frozen=True)
class Counterexample:
    """``S`` are the P-values fed in, ``V`` the single value that failed ``Q``."""

    S: tuple
    V: tuple
    witness: Construction | None = None
    checked: int = 0

    def __post_init__(self):
        assert len(self.V) == 1, "a counterexample names exactly one failing value"

    @property
    def valid(self) -> bool:
        return False

    @property
    def value(self):
        return self.V[0]


# ---------------------------------------------------------------- contracts


class _Blame(Exception):
    pass


class ClientBlame(_Blame):
    """A value entering the module failed ``P``: the input tuple is not admissible."""


class ModuleBlame(_Blame):
    def __init__(self, value, crossing: int):
        super().__init__(value)
        self.value = value
        self.crossing = crossing


@dataclass
class ContractLog:
    P: Callable
    Q: Callable
    entered: list = field(default_factory=list)  # P-checked values, in order
    crossings: list = field(default_factory=list)  # Q-checked values handed to the client

    def note_in(self, v):
        if not self.P(v):
            raise ClientBlame(v)
        if v not in self.entered:
            self.entered.append(v)
        return v

    def note_out(self, v):
        k = len(self.crossings)
        self.crossings.append(v)
        if not self.Q(v):
            raise ModuleBlame(v, k)
        return v


def wrap_contract(v, t: Type, log: ContractLog, incoming: bool):
    """Guard ``v : t`` crossing the boundary; ``incoming`` means client-to-module."""
    if not contains_abstract(t):
        return v
    if isinstance(t, TAbstract):
        return log.note_in(v) if incoming else log.note_out(v)
    if isinstance(t, TProd):
        return (v[0], wrap_contract(v[1], t.left, log, incoming), wrap_contract(v[2], t.right, log, incoming))
    if isinstance(t, TArrow):
        dom, cod = t.dom, t.cod

        def guarded(x):
            return wrap_contract(v(wrap_contract(x, dom, log, not incoming)), cod, log, incoming)

        guarded.expr = getattr(v, "expr", None)
        return guarded
    return v


# ---------------------------------------------------------------- enumeration


def diagonal(lists: Sequence[Sequence], cap: int) -> Iterator[tuple]:
    """Tuples ordered by the sum of positions, then lexicographically."""
    if any(not l for l in lists):
        return
    if not lists:
        yield ()
        return
    k = len(lists)
    lens = [len(l) for l in lists]
    emitted = 0

    def rec(i, remaining):
        if i == k - 1:
            if remaining < lens[i]:
                yield (remaining,)
            return
        rest_max = sum(n - 1 for n in lens[i + 1:])
        for j in range(max(0, remaining - rest_max), min(lens[i] - 1, remaining) + 1):
            for tail in rec(i + 1, remaining - j):
                yield (j, *tail)

    for total in range(sum(n - 1 for n in lens) + 1):
        for idx in rec(0, total):
            yield tuple(lists[i][j] for i, j in enumerate(idx))
            emitted += 1
            if emitted >= cap:
                return


@dataclass(frozen=True)
class CheckBudget:
    """Search bounds for one inductiveness query."""

    base_nodes: int = 15
    base_count: int = 30
    alpha_nodes: int = 30
    alpha_count: int = 3000
    per_op: int = 30000
    grammar: FnGrammar = FnGrammar()


class InductivenessChecker:
    """Checks ``P``/``Q`` conditional inductiveness of one program's interface."""

    def __init__(self, program, enumerator: Enumerator | None = None, budget: CheckBudget = CheckBudget()):
        self.program = program
        self.dts = program.dts
        self.rt = program.runtime
        self.tau_c = program.tau_c
        self.en = enumerator or Enumerator(self.dts)
        self.fen = FunctionEnumerator(self.en)
        self.budget = budget
        self._results: dict = {}
        self._functions: dict = {}
        self._base: dict = {}
        self._alpha_pool = None
        self._direct = False
        self.ops = [(n, t) for n, t in program.interface.items() if has_positive_abstract(t)]

    # ------------------------------------------------------------ candidate pools

    def _alpha_values(self) -> tuple:
        if self._alpha_pool is None:
            b = self.budget
            self._alpha_pool = self.en.values(self.tau_c, b.alpha_nodes, b.alpha_count)
        return self._alpha_pool

    def _candidates(self, P) -> tuple:
        if isinstance(P, SetMembership):
            return P.values
        return tuple(v for v in self._alpha_values() if P(v))

    def _base_values(self, t: Type) -> tuple:
        got = self._base.get(t)
        if got is None:
            got = self.en.values(t, self.budget.base_nodes, self.budget.base_count)
            self._base[t] = got
        return got

    def _function_values(self, t: Type) -> list:
        got = self._functions.get(t)
        if got is None:
            concrete = self.program.concrete_type(t)
            params, cod = uncurry(concrete)
            got = []
            for e in self.fen.functions(tuple(params), cod, self.budget.grammar):
                f = self.rt.compile(e)
                f.expr = e
                got.append(f)
            self._functions[t] = got
        return got

    def _slot_values(self, t: Type, cands: tuple) -> tuple:
        if isinstance(t, TAbstract):
            return cands
        if isinstance(t, TArrow):
            return tuple(self._function_values(t))
        if not contains_abstract(t):
            return self._base_values(t)
        left = self._slot_values(t.left, cands)
        right = self._slot_values(t.right, cands)
        return tuple(("," , l, r) for l, r in diagonal([left, right], self.budget.alpha_count))

    # ------------------------------------------------------------ checking

    def check(self, P, Q, stats=None, label: str = "inductive", ops: Sequence[str] | None = None, direct: bool = False):
        """First counterexample over all operations, or ``Valid``.

        ``direct`` evaluates first-order operations without contract wrappers
        and takes ``S`` to be the abstract parts of the arguments.
        """
        start = time.perf_counter()
        self._direct = direct
        try:
            return self._check(as_relation(P), as_relation(Q), ops)
        finally:
            if stats is not None:
                stats.record_verify(time.perf_counter() - start, label)

    def _check(self, P, Q, only) -> Valid | Counterexample:
        cands = self._candidates(P)
        checked = 0
        for name, t in self.ops:
            if only is not None and name not in only:
                continue
            cex, n = self._check_op(name, t, cands, P, Q)
            checked += n
            if cex is not None:
                return Counterexample(cex.S, cex.V, cex.witness, checked)
        return Valid(checked)

    def _check_op(self, name: str, t: Type, cands: tuple, P, Q):
        args_t, res_t = uncurry(t)
        fn = self.rt.lookup(name)
        if not args_t:
            log = ContractLog(P, Q)
            try:
                wrap_contract(fn, res_t, log, incoming=False)
            except ModuleBlame as mb:
                return Counterexample((), (mb.value,), Construction(name, (), (), ())), 1
            return None, 1
        outer = [i for i, a in enumerate(args_t) if contains_abstract(a) and not isinstance(a, TArrow)]
        inner = [i for i in range(len(args_t)) if i not in outer]
        outer_lists = [self._slot_values(args_t[i], cands) for i in outer]
        inner_lists = [self._slot_values(args_t[i], cands) for i in inner]
        if any(not l for l in outer_lists) or any(not l for l in inner_lists):
            return None, 0
        first_order = all(not isinstance(a, TArrow) for a in args_t)
        inner_tuples = list(diagonal(inner_lists, self.budget.per_op))
        checked = 0
        for otup in diagonal(outer_lists, self.budget.per_op):
            for itup in inner_tuples:
                if checked >= self.budget.per_op:
                    return None, checked
                checked += 1
                args = [None] * len(args_t)
                for i, v in zip(outer, otup):
                    args[i] = v
                for i, v in zip(inner, itup):
                    args[i] = v
                if self._direct:
                    cex = self._run_direct(name, tuple(args), args_t, res_t, Q)
                else:
                    cex = self._run(name, fn, tuple(args), args_t, res_t, P, Q, first_order)
                if cex is not None:
                    return cex, checked
        return None, checked

    def _run(self, name, fn, args, args_t, res_t, P, Q, first_order):
        log = ContractLog(P, Q)
        try:
            wrapped = [wrap_contract(a, at, log, incoming=True) for a, at in zip(args, args_t)]
        except ClientBlame:
            return None
        key = (name, args) if first_order else None
        try:
            if key is not None and key in self._results:
                out = self._results[key]
            else:
                out = fn
                for a in wrapped:
                    out = self._apply(out, a)
                if key is not None:
                    self._results[key] = out
            self._check_result(out, res_t, log, ())
        except ClientBlame:
            return None
        except ModuleBlame as mb:
            path = mb.path if hasattr(mb, "path") else (("crossing", mb.crossing),)
            return Counterexample(tuple(log.entered), (mb.value,), Construction(name, args, tuple(args_t), path))
        except (FuelExhausted, LangError):
            return None
        return None

    def _run_direct(self, name, args, args_t, res_t, Q):
        if any(isinstance(a, TArrow) for a in args_t):
            raise ValueError(f"direct checking needs a first-order operation, `{name}` is not")
        try:
            out = self.rt.call(self.rt.lookup(name), *args)
        except (FuelExhausted, LangError):
            return None
        bad = _first_failure(out, res_t, Q, ())
        if bad is None:
            return None
        v, path = bad
        S = []
        for a, at in zip(args, args_t):
            for u in collect_at_abstract(a, at):
                if u not in S:
                    S.append(u)
        return Counterexample(tuple(S), (v,), Construction(name, args, tuple(args_t), path))

    def _apply(self, f, a):
        return self.rt.run(lambda: f(a))

    def _check_result(self, v, t: Type, log: ContractLog, path: tuple):
        if not contains_abstract(t):
            return
        if isinstance(t, TAbstract):
            if not log.Q(v):
                mb = ModuleBlame(v, -1)
                mb.path = path
                raise mb
            return
        if isinstance(t, TProd):
            self._check_result(v[1], t.left, log, path + (("proj", 1),))
            self._check_result(v[2], t.right, log, path + (("proj", 2),))
            return
        # a function result that mentions the abstract type: leave it unchecked


def _first_failure(v, t: Type, Q, path):
    if isinstance(t, TAbstract):
        return None if Q(v) else (v, path)
    if isinstance(t, TProd):
        return _first_failure(v[1], t.left, Q, path + (("proj", 1),)) or _first_failure(
            v[2], t.right, Q, path + (("proj", 2),)
        )
    return None


def cond_inductive(program, P, Q, checker: InductivenessChecker | None = None, stats=None, **kw):
    """One-shot convenience wrapper around ``InductivenessChecker.check``."""
    checker = checker or InductivenessChecker(program)
    return checker.check(P, Q, stats=stats, **kw)


def collect_v(v, t: Type) -> list:
    return collect_at_abstract(v, t)


# ---------------------------------------------------------------- replay


def replay(value, registry: dict, program) -> list[str]:
    """Re-run the constructions behind ``value`` bottom-up and return the steps.

    ``registry`` maps abstract values to their ``Construction``; values produced
    by a nullary operation have a construction with no arguments. Raises
    ``AssertionError`` if re-running does not reproduce the value.
    """
    steps: list[str] = []
    done: set = set()

    def go(v):
        if v in done:
            return
        c = registry.get(v)
        if c is None:
            raise AssertionError(f"no construction recorded for {show(v, program.dts)}")
        for a, at in zip(c.args, c.arg_types):
            if not isinstance(at, TArrow):
                for u in collect_at_abstract(a, at):
                    go(u)
        got = _rerun(c, program)
        assert got == v, f"replaying {c.op} gave {show(got, program.dts)}, expected {show(v, program.dts)}"
        steps.append(f"{show(v, program.dts)} = {c.describe(program.dts)}")
        done.add(v)

    go(value)
    return steps


def _rerun(c: Construction, program):
    rt = program.runtime
    crossings: list = []

    def spy(x, t, incoming):
        if not contains_abstract(t):
            return x
        if isinstance(t, TAbstract):
            if not incoming:
                crossings.append(x)
            return x
        if isinstance(t, TProd):
            return (x[0], spy(x[1], t.left, incoming), spy(x[2], t.right, incoming))
        if isinstance(t, TArrow):
            return lambda y: spy(x(spy(y, t.dom, not incoming)), t.cod, incoming)
        return x

    out = rt.lookup(c.op)
    for a, at in zip(c.args, c.arg_types):
        out = rt.run(lambda f=out, a=spy(a, at, True): f(a))
    for step, k in c.path:
        if step == "proj":
            out = out[k]
        else:
            return crossings[k] if k < len(crossings) else None
    return out

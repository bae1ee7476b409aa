"""Example-directed enumerative synthesis of predicates ``tau_c -> bool``.

Candidates come in two shapes:

* flat: ``fun s -> F`` where ``F`` is a boolean combination of atoms over ``s``;
* structural: ``let rec inv s = match s with C (x, ...) -> F_C | ...`` where each
  arm combines atoms over the constructor fields and recursive calls on fields of
  the concrete type.

Because the example set is trace complete, a recursive call on a field can be
evaluated by looking up the field's label, so every arm is an independent
boolean-function learning problem over a bitmask per atom.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .enumerate import Enumerator
from .lang.errors import FuelExhausted, LangError
from .lang.syntax import (
    FALSE_E,
    TRUE_E,
    App,
    Ctor,
    Eq,
    Expr,
    Fun,
    LetRec,
    Match,
    PCtor,
    PPair,
    Proj,
    Var,
    and_,
    expr_size,
    free_vars,
    not_,
    or_,
)
from .lang.types import BOOL, Datatypes, TAbstract, TArrow, TNamed, TProd, Type, is_arrow_free, uncurry
from .lang.values import is_true, subvalues_at

# ---------------------------------------------------------------- examples


@dataclass(frozen=True)
class ExampleSet:
    positives: tuple = ()
    negatives: tuple = ()

    @staticmethod
    def of(positives: Iterable = (), negatives: Iterable = ()) -> "ExampleSet":
        return ExampleSet(tuple(dict.fromkeys(positives)), tuple(dict.fromkeys(negatives)))

    def disjoint(self) -> bool:
        return not (set(self.positives) & set(self.negatives))

    def labels(self) -> dict:
        out = {v: False for v in self.negatives}
        out.update({v: True for v in self.positives})
        return out

    def __len__(self):
        return len(self.positives) + len(self.negatives)


def trace_complete(ex: ExampleSet, tau_c: Type, dts: Datatypes) -> ExampleSet:
    """Add every unlabeled strict ``tau_c`` subvalue of an example as a negative."""
    known = set(ex.positives) | set(ex.negatives)
    added = []
    for v in itertools.chain(ex.positives, ex.negatives):
        for u in subvalues_at(v, tau_c, tau_c, dts, strict=True):
            if u not in known:
                known.add(u)
                added.append(u)
    if not added:
        return ex
    return ExampleSet(ex.positives, ex.negatives + tuple(added))


# ---------------------------------------------------------------- predicates


class Predicate:
    """A compiled ``tau_c -> bool`` object-language function with a memo table."""

    __slots__ = ("expr", "fn", "size", "_runtime", "_memo", "label")

    def __init__(self, expr: Expr, fn: Callable, runtime, label: str | None = None):
        self.expr = expr
        self.fn = fn
        self.size = expr_size(expr)
        self._runtime = runtime
        self._memo: dict = {}
        self.label = label

    def __call__(self, v) -> bool:
        r = self._memo.get(v)
        if r is None:
            r = is_true(self._runtime.call(self.fn, v))
            self._memo[v] = r
        return r

    def sound_on(self, ex: ExampleSet) -> bool:
        return all(self(v) for v in ex.positives) and not any(self(v) for v in ex.negatives)

    def __repr__(self):
        from .lang.pretty import pretty_expr

        return f"Predicate({pretty_expr(self.expr)})"

    def __eq__(self, other):
        return isinstance(other, Predicate) and other.expr == self.expr

    def __hash__(self):
        return hash(self.expr)


def make_predicate(program, expr: Expr, label: str | None = None) -> Predicate:
    return Predicate(expr, program.compile_predicate(expr), program.runtime, label)


def conjoin(program, p: Predicate, q: Predicate) -> Predicate:
    s = "s_conj"
    body = and_(App(p.expr, Var(s)), App(q.expr, Var(s)))
    return make_predicate(program, Fun(s, program.tau_c, body))


@dataclass(frozen=True)
class SynthResult:
    candidates: tuple[Predicate, ...] = ()
    reason: str = ""
    added_negatives: tuple = ()

    @property
    def success(self) -> bool:
        return bool(self.candidates)

    @property
    def first(self) -> Predicate:
        return self.candidates[0]


class CandidateCache:
    """Earlier synthesis results, tried in order before calling the synthesizer."""

    def __init__(self):
        self.items: list[Predicate] = []
        self._seen: set = set()

    def add_all(self, preds: Iterable[Predicate]) -> None:
        for p in preds:
            if p.expr not in self._seen:
                self._seen.add(p.expr)
                self.items.append(p)

    def lookup(self, ex: ExampleSet) -> Predicate | None:
        for p in self.items:
            try:
                if p.sound_on(ex):
                    return p
            except FuelExhausted:
                continue
        return None

    def clear(self):
        self.items.clear()
        self._seen.clear()


def candidate_cache_lookup(ex: ExampleSet, cache: CandidateCache) -> Predicate | None:
    return cache.lookup(ex)


# ---------------------------------------------------------------- atoms


@dataclass
class Atom:
    expr: Expr
    size: int
    fn: Callable | None = None  # uncurried over the scope variables
    rec_field: int | None = None  # index into the scope for recursive calls


@dataclass
class Scope:
    """Variables available in one arm (or in the flat shape)."""

    names: tuple[str, ...]
    types: tuple[Type, ...]
    ctor: str | None = None
    atoms: list[Atom] = field(default_factory=list)


class _BranchSearch:
    """Bottom-up enumeration of boolean formulas, one pool entry per behaviour."""

    POOL_CAP = 3000
    WORK_CAP = 1_500_000

    def __init__(self, atoms: list[tuple[Expr, int, int]], target: int, full: int):
        self.target = target
        self.full = full
        self.atoms_by_size: dict[int, list[tuple[int, Expr]]] = {}
        for expr, size, mask in atoms:
            self.atoms_by_size.setdefault(size, []).append((mask, expr))
        self.pool: dict[int, list[tuple[int, Expr]]] = {}
        self.seen: set[int] = set()
        self.solutions: dict[int, list[Expr]] = {}
        self.level = 0
        self.work = 0
        self.exhausted = False

    def first_solution_size(self, limit: int) -> int | None:
        n = 1
        while n <= limit:
            self.advance(n)
            if self.solutions.get(n):
                return n
            n += 1
        return None

    def advance(self, n: int) -> None:
        while self.level < n:
            self.level += 1
            self._build(self.level)

    def _build(self, n: int) -> None:
        made: list[tuple[int, Expr]] = []
        if n == 1:
            made.append((self.full, TRUE_E))
            made.append((0, FALSE_E))
        made.extend(self.atoms_by_size.get(n, ()))
        if not self.exhausted:
            for mask, e in self.pool.get(n - 3, ()):
                if e is TRUE_E or e is FALSE_E:
                    continue
                made.append((self.full ^ mask, not_(e)))
            for sa in range(1, (n - 2) // 2 + 1):
                sb = n - 2 - sa
                left = self.pool.get(sa, ())
                right = self.pool.get(sb, ())
                for i, (ma, ea) in enumerate(left):
                    if ea is TRUE_E or ea is FALSE_E:
                        continue
                    start = i + 1 if sa == sb else 0
                    for mb, eb in right[start:]:
                        if eb is TRUE_E or eb is FALSE_E:
                            continue
                        made.append((ma & mb, and_(ea, eb)))
                        made.append((ma | mb, or_(ea, eb)))
                    self.work += len(right)
                    if self.work > self.WORK_CAP:
                        self.exhausted = True
                        break
                if self.exhausted:
                    break
        pool = []
        sols = []
        for mask, e in made:
            if mask == self.target:
                sols.append(e)
            if mask not in self.seen:
                self.seen.add(mask)
                if len(pool) < self.POOL_CAP:
                    pool.append((mask, e))
        self.pool[n] = pool
        if sols:
            self.solutions[n] = sols


class Synthesizer:
    """The default synthesizer; see the module docstring for the grammar."""

    def __init__(
        self,
        program,
        max_size: int = 40,
        start: int = 5,
        step: int = 5,
        max_candidates: int = 12,
        const_nodes: int = 2,
    ):
        self.program = program
        self.dts: Datatypes = program.dts
        self.rt = program.runtime
        self.tau_c: Type = program.tau_c
        self.max_size = max_size
        self.start = start
        self.step = step
        self.max_candidates = max_candidates
        self.const_nodes = const_nodes
        self.en = Enumerator(self.dts)
        self._atom_memo: dict[tuple[int, object], bool | None] = {}
        self._fresh = itertools.count()
        self.flat = self._flat_scope()
        self.arms = self._arm_scopes()
        self.rec_name = "inv"
        self.param = "s"

    # ------------------------------------------------------------ scopes

    def _flat_scope(self) -> Scope:
        sc = Scope(("s",), (self.tau_c,))
        sc.atoms = self._atoms(sc, rec_fields=())
        return sc

    def _binder_names(self, fields: tuple[Type, ...]) -> tuple[str, ...]:
        out = []
        for i, f in enumerate(fields):
            base = f.name[0] if isinstance(f, TNamed) else "p"
            out.append(f"{base}{i + 1}")
        return tuple(out)

    def _arm_scopes(self) -> list[Scope] | None:
        t = self.tau_c
        if isinstance(t, TNamed):
            ctors = self.dts.adt(t.name).ctors
            if not ctors:
                return None
            scopes = []
            for c in ctors:
                names = self._binder_names(c.fields)
                sc = Scope(names, c.fields, ctor=c.name)
                rec = tuple(i for i, f in enumerate(c.fields) if f == t)
                sc.atoms = self._atoms(sc, rec)
                scopes.append(sc)
            return scopes
        return None

    def _constants(self, t: Type) -> list[Expr]:
        from .enumerate import _value_expr

        if not is_arrow_free(t):
            return []
        return [_value_expr(v) for v in self.en.stream(t, self.const_nodes, 8)]

    def _terms(self, sc: Scope) -> dict[Type, list[Expr]]:
        """Non-boolean terms by type: variables, projections, constants, helper results."""
        terms: dict[Type, list[Expr]] = {}

        def add(t, e):
            lst = terms.setdefault(t, [])
            if e not in lst:
                lst.append(e)

        for n, t in zip(sc.names, sc.types):
            add(t, Var(n))
            if isinstance(t, TProd):
                add(t.left, Proj(1, Var(n)))
                add(t.right, Proj(2, Var(n)))
        var_terms = {t: list(v) for t, v in terms.items()}
        for h in self.program.helpers:
            args, res = uncurry(h.type)
            if h.arity == 0:
                if is_arrow_free(h.type) and h.type != BOOL:
                    add(h.type, Var(h.name))
                continue
            if res == BOOL or res == self.tau_c or not is_arrow_free(res):
                continue
            if any(not is_arrow_free(a) for a in args) or len(args) != h.arity:
                continue
            pools = [var_terms.get(a, []) for a in args]
            for combo in itertools.islice(itertools.product(*pools), 12):
                e: Expr = Var(h.name)
                for a in combo:
                    e = App(e, a)
                add(res, e)
        return terms

    def _atoms(self, sc: Scope, rec_fields: tuple[int, ...]) -> list[Atom]:
        terms = self._terms(sc)
        consts: dict[Type, list[Expr]] = {}

        def args_for(t):
            if t not in consts:
                consts[t] = self._constants(t)
            return terms.get(t, []) + consts[t]

        atoms: list[Atom] = []
        seen: set = set()
        scope_names = set(sc.names)

        def uses_scope(e: Expr) -> bool:
            return bool(free_vars(e) & scope_names)

        def push(e: Expr, rec=None):
            if e in seen:
                return
            seen.add(e)
            atoms.append(Atom(e, expr_size(e), rec_field=rec))

        for i in rec_fields:
            push(App(Var("inv"), Var(sc.names[i])), rec=i)
        for n, t in zip(sc.names, sc.types):
            if t == BOOL:
                push(Var(n))
        for h in self.program.helpers:
            args, res = uncurry(h.type)
            if res != BOOL or h.arity == 0 or len(args) != h.arity:
                continue
            if any(not is_arrow_free(a) for a in args):
                continue
            pools = [args_for(a) for a in args]
            if any(not p for p in pools):
                continue
            count = 0
            for combo in itertools.product(*pools):
                if not any(uses_scope(a) for a in combo):
                    continue
                e: Expr = Var(h.name)
                for a in combo:
                    e = App(e, a)
                push(e)
                count += 1
                if count >= 64:
                    break
        for t, ts in terms.items():
            if not is_arrow_free(t) or t == BOOL:
                continue
            for i, a in enumerate(ts):
                if not uses_scope(a):
                    continue
                for b in ts[i + 1:]:
                    push(Eq(a, b))
                for c in args_for(t)[len(ts):]:
                    push(Eq(a, c))
        for a in atoms:
            if a.rec_field is None:
                try:
                    a.fn = self.rt.compile(a.expr, sc.names, as_function=True)
                except LangError:
                    a.fn = None
        return [a for a in atoms if a.rec_field is not None or a.fn is not None]

    # ------------------------------------------------------------ evaluation

    def _atom_value(self, atom: Atom, env: tuple) -> bool | None:
        key = (id(atom), env)
        got = self._atom_memo.get(key, _MISSING)
        if got is _MISSING:
            try:
                got = is_true(self.rt.call_n(atom.fn, *env))
            except (FuelExhausted, LangError):
                got = None
            self._atom_memo[key] = got
        return got

    def _masks(self, sc: Scope, envs: list[tuple], labels: dict) -> list[tuple[Expr, int, int]]:
        out = []
        for atom in sc.atoms:
            mask = 0
            ok = True
            for bit, env in enumerate(envs):
                if atom.rec_field is not None:
                    val = labels.get(env[atom.rec_field])
                else:
                    val = self._atom_value(atom, env)
                if val is None:
                    ok = False
                    break
                if val:
                    mask |= 1 << bit
            if ok:
                out.append((atom.expr, atom.size, mask))
        return out

    # ------------------------------------------------------------ search

    def synth(self, ex: ExampleSet, stats=None) -> SynthResult:
        start = time.perf_counter()
        try:
            return self._synth(ex)
        finally:
            if stats is not None:
                stats.record_synth(time.perf_counter() - start, len(ex))

    def _synth(self, ex: ExampleSet) -> SynthResult:
        if not ex.disjoint():
            return SynthResult((), "positive and negative examples overlap")
        full_ex = trace_complete(ex, self.tau_c, self.dts)
        added = full_ex.negatives[len(ex.negatives):]
        labels = full_ex.labels()
        values = list(labels)

        shapes = []  # (overhead, [(search, ...)], builder)
        # flat shape
        envs = [(v,) for v in values]
        target = sum(1 << i for i, v in enumerate(values) if labels[v])
        full = (1 << len(values)) - 1
        flat_search = _BranchSearch(self._masks(self.flat, envs, labels), target, full)
        shapes.append(("flat", 1, [flat_search]))
        if self.arms is not None:
            searches = []
            for sc in self.arms:
                mine = [v for v in values if v[0] == sc.ctor]
                envs = [tuple(v[1:]) for v in mine]
                target = sum(1 << i for i, v in enumerate(mine) if labels[v])
                full = (1 << len(mine)) - 1
                searches.append(_BranchSearch(self._masks(sc, envs, labels), target, full))
            shapes.append(("match", 3, searches))

        found: list[tuple[int, int, Expr]] = []
        for order, (kind, overhead, searches) in enumerate(shapes):
            mins = []
            for i, s in enumerate(searches):
                others = sum(1 for j in range(len(searches)) if j != i)
                limit = self.max_size - overhead - others - 2
                m = s.first_solution_size(limit)
                if m is None:
                    mins = None
                    break
                mins.append(m)
            if mins is None:
                continue
            base = overhead + sum(mins)
            if kind == "match":
                base += 2  # possible recursion wrapper
            if base > self.max_size:
                continue
            level = self.start
            while level < base:
                level += self.step
            level = min(level, self.max_size)
            slack = level - base
            per_arm = []
            for s, m in zip(searches, mins):
                s.advance(m + slack)
                sols = []
                for size in range(m, m + slack + 1):
                    for e in s.solutions.get(size, ()):
                        sols.append((size, e))
                per_arm.append(sols[: self.max_candidates])
            combos = itertools.product(*per_arm)
            for combo in itertools.islice(combos, 200):
                expr = self._assemble(kind, [e for _, e in combo])
                size = expr_size(expr)
                if size <= level:
                    found.append((size, order, expr))
        if not found:
            return SynthResult((), "no separating predicate within the size budget", added)
        found.sort(key=lambda x: (x[0], x[1]))
        preds = []
        seen = set()
        for size, _, expr in found:
            if expr in seen:
                continue
            seen.add(expr)
            try:
                p = make_predicate(self.program, expr)
                if p.sound_on(full_ex):
                    preds.append(p)
            except (FuelExhausted, LangError):
                continue
            if len(preds) >= self.max_candidates:
                break
        if not preds:
            return SynthResult((), "candidates failed the soundness re-check", added)
        return SynthResult(tuple(preds), "", added)

    def _assemble(self, kind: str, bodies: list[Expr]) -> Expr:
        if kind == "flat":
            return Fun(self.param, self.tau_c, bodies[0])
        branches = []
        uses_rec = False
        for sc, body in zip(self.arms, bodies):
            branches.append((PCtor(sc.ctor, tuple(n if _mentions(body, n) else None for n in sc.names)), body))
            uses_rec = uses_rec or _mentions(body, self.rec_name)
        fn = Fun(self.param, self.tau_c, Match(Var(self.param), tuple(branches)))
        if uses_rec:
            return LetRec(self.rec_name, fn, BOOL, Var(self.rec_name))
        return fn


class TableSynthesizer:
    """Exhaustive synthesizer for finite enumerations: accept everything but the negatives."""

    def __init__(self, program):
        self.program = program
        t = program.tau_c
        if not isinstance(t, TNamed) or any(c.fields for c in program.dts.adt(t.name).ctors):
            raise ValueError("table synthesis needs an enumeration type")
        self.ctors = program.dts.adt(t.name).ctors

    def synth(self, ex: ExampleSet, stats=None) -> SynthResult:
        start = time.perf_counter()
        try:
            if not ex.disjoint():
                return SynthResult((), "positive and negative examples overlap")
            neg = {v[0] for v in ex.negatives}
            if not neg:
                expr = Fun("s", self.program.tau_c, TRUE_E)
            else:
                arms = tuple((PCtor(c.name), FALSE_E if c.name in neg else TRUE_E) for c in self.ctors)
                expr = Fun("s", self.program.tau_c, Match(Var("s"), arms))
            return SynthResult((make_predicate(self.program, expr),))
        finally:
            if stats is not None:
                stats.record_synth(time.perf_counter() - start, len(ex))


_MISSING = object()



def _mentions(e: Expr, name: str) -> bool:
    from .lang.syntax import free_vars

    return name in free_vars(e)

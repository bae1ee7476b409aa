"""Inference drivers: the main positive/negative example loop and three baselines."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .enumerate import Enumerator
from .induct import (
    CheckBudget,
    Construction,
    Counterexample,
    InductivenessChecker,
    PredicateTest,
    SetMembership,
    replay,
)
from .lang.errors import FuelExhausted
from .lang.types import TAbstract, Type, substitute_abstract
from .lang.values import collect_at_abstract, show
from .stats import RunStats
from .synth import CandidateCache, ExampleSet, Predicate, SynthResult, Synthesizer, conjoin
from .verify import MULTI, SINGLE, VerifBudget, VerifOutcome, default_budget, product_stream

INVARIANT = "Invariant"
SPEC_VIOLATION = "SpecViolation"
SYNTH_FAILURE = "SynthFailure"
TIMEOUT = "Timeout"
REJECTED = "Rejected"

MODES = ("hanoi", "conjstr", "la", "oneshot")


class UnsupportedMode(Exception):
    pass


class _Timeout(Exception):
    pass


@dataclass
class Outcome:
    kind: str
    invariant: Predicate | None = None
    bounded: bool = True
    violation: tuple = ()
    replays: tuple = ()
    message: str = ""
    stats: RunStats | None = None
    positives: tuple = ()
    negatives: tuple = ()

    @property
    def ok(self) -> bool:
        return self.kind == INVARIANT


@dataclass
class Options:
    timeout: float = 1800.0
    synth_cache: bool = True
    cexlist_cache: bool = True
    debug_rank: bool = False
    verif_budget: VerifBudget | None = None  # overrides the two below
    single_budget: VerifBudget = SINGLE
    multi_budget: VerifBudget = MULTI
    check_budget: CheckBudget = field(default_factory=CheckBudget)
    synth_max_size: int = 40
    oneshot_examples: int = 30


# ---------------------------------------------------------------- sufficiency


class SufficiencyChecker:
    """Bounded check that every tuple whose abstract parts satisfy ``I`` meets the specification.

    The specification does not depend on ``I``, so the failing tuples are computed once in
    verifier order; a query then only needs the first failing tuple whose
    abstract parts all satisfy ``I``. This visits exactly the tuples the naive
    query would, so counterexamples and tuple counts coincide.
    """

    def __init__(self, program, en: Enumerator, budget: VerifBudget | None = None):
        self.program = program
        self.en = en
        self.qtypes = [t for _, t in program.quantifiers]
        self.budget = budget or default_budget(len(self.qtypes))
        self._failing: list | None = None
        self._total = 0

    def _concrete(self) -> list[Type]:
        return [substitute_abstract(t, self.program.tau_c) for t in self.qtypes]

    def _prepare(self):
        failing = []
        total = 0
        for tup in product_stream(self.en, self._concrete(), self.budget):
            total += 1
            try:
                ok = self.program.spec_holds(*tup)
            except FuelExhausted:
                ok = True
            if not ok:
                comps = []
                for v, t in zip(tup, self.qtypes):
                    comps.extend(collect_at_abstract(v, t))
                failing.append((total, tup, tuple(dict.fromkeys(comps))))
        self._failing = failing
        self._total = total

    def check(self, inv: Callable, stats=None, label: str = "sufficiency") -> VerifOutcome:
        start = time.perf_counter()
        try:
            if self._failing is None:
                self._prepare()
            for idx, tup, comps in self._failing:
                if all(inv(c) for c in comps):
                    return VerifOutcome(tup, idx)
            return VerifOutcome(None, self._total)
        finally:
            if stats is not None:
                stats.record_verify(time.perf_counter() - start, label)

    def abstract_parts(self, tup) -> tuple:
        comps = []
        for v, t in zip(tup, self.qtypes):
            comps.extend(collect_at_abstract(v, t))
        return tuple(dict.fromkeys(comps))


@dataclass(frozen=True)
class NegativeResult:
    """What ``no_negatives`` found: a specification failure or a full-inductiveness failure."""

    kind: str  # "sufficiency" | "inductive"
    values: tuple
    tuple_: tuple | None = None
    cex: Counterexample | None = None


# ---------------------------------------------------------------- engine


class Engine:
    def __init__(self, program, options: Options | None = None, synthesizer=None, mode: str = "hanoi", flags=()):
        self.program = program
        self.options = options or Options()
        self.en = Enumerator(program.dts)
        self.checker = InductivenessChecker(program, self.en, self.options.check_budget)
        self.synthesizer = synthesizer or Synthesizer(program, max_size=self.options.synth_max_size)
        budget = self.options.verif_budget
        if budget is None:
            budget = self.options.single_budget if len(program.quantifiers) == 1 else self.options.multi_budget
        self.sufficiency = SufficiencyChecker(program, self.en, budget)
        self.stats = RunStats(name=program.name, mode=mode, flags=tuple(flags))
        self.cache = CandidateCache()
        self.deadline = self.stats.started + self.options.timeout
        self.registry: dict = {}

    # ------------------------------------------------------------ pieces

    def tick(self):
        if time.perf_counter() > self.deadline:
            raise _Timeout()

    def closed_positives(self, positives: Iterable, inv: Callable):
        """Visible inductiveness: one step from the known positives must stay inside ``inv``."""
        return self.checker.check(SetMembership(positives), inv, stats=self.stats, label="visible")

    def no_negatives(self, inv: Callable) -> NegativeResult | None:
        out = self.sufficiency.check(inv, self.stats)
        if not out.valid:
            return NegativeResult("sufficiency", self.sufficiency.abstract_parts(out.counterexample), out.counterexample)
        r = self.checker.check(inv, inv, stats=self.stats, label="full")
        if isinstance(r, Counterexample):
            return NegativeResult("inductive", r.S, None, r)
        return None

    def synth(self, ex: ExampleSet, use_cache: bool | None = None) -> Predicate | None:
        use_cache = self.options.synth_cache if use_cache is None else use_cache
        if use_cache:
            hit = self.cache.lookup(ex)
            if hit is not None:
                self.stats.cache_hits += 1
                return hit
        r: SynthResult = self.synthesizer.synth(ex, self.stats)
        if not r.success:
            return None
        if use_cache:
            self.cache.add_all(r.candidates)
        return r.first

    def add_positive(self, v, witness: Construction | None):
        if v not in self.registry and witness is not None:
            self.registry[v] = witness

    def replays(self, values) -> tuple:
        out = []
        for v in values:
            try:
                out.extend(replay(v, self.registry, self.program))
            except AssertionError as err:
                out.append(f"{show(v, self.program.dts)}: {err}")
        return tuple(dict.fromkeys(out))

    def finish(self, outcome: Outcome) -> Outcome:
        size = outcome.invariant.size if outcome.invariant is not None and outcome.kind == INVARIANT else None
        self.stats.finish(outcome.kind, size)
        outcome.stats = self.stats
        return outcome

    def violation(self, values, pos, neg) -> Outcome:
        shown = ", ".join(show(v, self.program.dts) for v in values) or "(no abstract values)"
        return Outcome(
            SPEC_VIOLATION,
            violation=tuple(values),
            replays=self.replays(values),
            message=f"specification fails on constructible values: {shown}",
            positives=tuple(pos),
            negatives=tuple(neg),
        )

    def recheck(self, inv: Callable) -> bool:
        """Both negative-side checks plus closure of the nullary operations."""
        if self.no_negatives(inv) is not None:
            return False
        return self.closed_positives((), inv).valid


# ---------------------------------------------------------------- counterexample list


def cex_list_filter(trace: list, new_positive) -> tuple[set, list]:
    """Keep the longest prefix of ``trace`` whose predicates accept ``new_positive``.

    Returns the union of the kept entries' negatives and the trimmed trace.
    """
    kept = []
    for pred, negs in trace:
        try:
            ok = pred(new_positive)
        except FuelExhausted:
            ok = False
        if not ok:
            break
        kept.append((pred, negs))
    resume: dict = {}
    for _, negs in kept:
        for v in negs:
            resume[v] = None
    return set(resume), kept


def _resume_list(trace: list, positives) -> list:
    pos = set(positives)
    out: dict = {}
    for _, negs in trace:
        for v in negs:
            if v not in pos:
                out[v] = None
    return list(out)


# ---------------------------------------------------------------- main loop


def hanoi(engine: Engine, positives=(), negatives=()) -> Outcome:
    """Alternate synthesis with visible-inductiveness and negative checks."""
    try:
        return engine.finish(_hanoi(engine, list(positives), list(negatives)))
    except _Timeout:
        return engine.finish(Outcome(TIMEOUT, message=f"no result within {engine.options.timeout:g} s"))


def _hanoi(engine: Engine, pos: list, neg: list) -> Outcome:
    opts = engine.options
    trace: list = []
    rank = None
    while True:
        engine.tick()
        if opts.debug_rank:
            new_rank = (-len(pos), -len(neg))
            assert rank is None or new_rank < rank, f"rank did not decrease: {rank} -> {new_rank}"
            rank = new_rank
        assert not (set(pos) & set(neg)), "positive and negative examples overlap"
        inv = engine.synth(ExampleSet(tuple(pos), tuple(neg)))
        if inv is None:
            return Outcome(SYNTH_FAILURE, message="no predicate separates the examples", positives=tuple(pos), negatives=tuple(neg))
        engine.tick()
        cp = engine.closed_positives(pos, inv)
        if isinstance(cp, Counterexample):
            v = cp.value
            engine.add_positive(v, cp.witness)
            pos.append(v)
            if opts.cexlist_cache:
                _, trace = cex_list_filter(trace, v)
                neg = _resume_list(trace, pos)
            else:
                trace = []
                neg = []
            continue
        engine.tick()
        nn = engine.no_negatives(inv)
        if nn is None:
            return Outcome(INVARIANT, inv, positives=tuple(pos), negatives=tuple(neg))
        pset = set(pos)
        fresh = [v for v in nn.values if v not in pset]
        if nn.kind == "sufficiency":
            if not fresh:
                return engine.violation(nn.values, pos, neg)
        elif not fresh:
            # every input was already known constructible, so the output is too
            v = nn.cex.value
            engine.add_positive(v, nn.cex.witness)
            pos.append(v)
            if opts.cexlist_cache:
                _, trace = cex_list_filter(trace, v)
                neg = _resume_list(trace, pos)
            else:
                trace = []
                neg = []
            continue
        neg.extend(fresh)
        trace.append((inv, tuple(fresh)))


# ---------------------------------------------------------------- baselines


def run_conj_str(engine: Engine) -> Outcome:
    """Conjunctive strengthening: find a sufficient candidate, then conjoin until inductive."""
    try:
        return engine.finish(_conj_str(engine))
    except _Timeout:
        return engine.finish(Outcome(TIMEOUT, message=f"no result within {engine.options.timeout:g} s"))


def _conj_str(engine: Engine) -> Outcome:
    pos: list = []
    program = engine.program
    while True:  # one pass per positive-example epoch
        engine.cache.clear()
        restart = False
        neg: list = []
        # a sufficient, visibly inductive first conjunct
        while True:
            engine.tick()
            inv = engine.synth(ExampleSet(tuple(pos), tuple(neg)))
            if inv is None:
                return Outcome(SYNTH_FAILURE, message="no predicate separates the examples", positives=tuple(pos), negatives=tuple(neg))
            cp = engine.closed_positives(pos, inv)
            if isinstance(cp, Counterexample):
                engine.add_positive(cp.value, cp.witness)
                pos.append(cp.value)
                restart = True
                break
            out = engine.sufficiency.check(inv, engine.stats)
            if out.valid:
                break
            parts = engine.sufficiency.abstract_parts(out.counterexample)
            fresh = [v for v in parts if v not in set(pos)]
            if not fresh:
                return engine.violation(parts, pos, neg)
            neg.extend(fresh)
        if restart:
            continue
        conj = inv
        # strengthen
        while True:
            engine.tick()
            r = engine.checker.check(conj, conj, stats=engine.stats, label="full")
            if not isinstance(r, Counterexample):
                return Outcome(INVARIANT, conj, positives=tuple(pos), negatives=tuple(neg))
            local_neg: list = []
            cex = r
            while True:
                engine.tick()
                fresh = [v for v in cex.S if v not in set(pos) and v not in local_neg]
                if not fresh:
                    engine.add_positive(cex.value, cex.witness)
                    pos.append(cex.value)
                    restart = True
                    break
                local_neg.extend(fresh)
                extra = engine.synth(ExampleSet(tuple(pos), tuple(local_neg)))
                if extra is None:
                    return Outcome(SYNTH_FAILURE, message="no strengthening conjunct found", positives=tuple(pos))
                both = conjoin(program, conj, extra)
                r2 = engine.checker.check(both, conj, stats=engine.stats, label="relative")
                if not isinstance(r2, Counterexample):
                    conj = both
                    break
                cex = r2
            if restart:
                break


def run_la(engine: Engine) -> Outcome:
    """One operation at a time, full-inductiveness counterexamples only."""
    try:
        return engine.finish(_la(engine))
    except _Timeout:
        return engine.finish(Outcome(TIMEOUT, message=f"no result within {engine.options.timeout:g} s"))


def _la(engine: Engine) -> Outcome:
    pos: list = []
    neg: list = []
    ops = [n for n, _ in engine.checker.ops]
    while True:
        engine.tick()
        inv = engine.synth(ExampleSet(tuple(pos), tuple(neg)))
        if inv is None:
            return Outcome(SYNTH_FAILURE, message="no predicate separates the examples", positives=tuple(pos), negatives=tuple(neg))
        out = engine.sufficiency.check(inv, engine.stats)
        if not out.valid:
            parts = engine.sufficiency.abstract_parts(out.counterexample)
            fresh = [v for v in parts if v not in set(pos)]
            if not fresh:
                return engine.violation(parts, pos, neg)
            neg.extend(fresh)
            continue
        found = None
        for op in ops:
            engine.tick()
            r = engine.checker.check(inv, inv, stats=engine.stats, label=f"full:{op}", ops=(op,))
            if isinstance(r, Counterexample):
                found = r
                break
        if found is None:
            return Outcome(INVARIANT, inv, positives=tuple(pos), negatives=tuple(neg))
        pset = set(pos)
        if all(v in pset for v in found.S):
            v = found.value
            engine.add_positive(v, found.witness)
            pos.append(v)
            neg = [u for u in neg if u != v]
        else:
            neg.extend(v for v in found.S if v not in pset and v not in neg)


def run_oneshot(engine: Engine) -> Outcome:
    """Label the smallest concrete values by the specification and synthesize once.

    The single candidate is re-checked once; an unsound one is reported as
    ``Rejected`` rather than as an invariant.
    """
    program = engine.program
    qs = program.quantifiers
    if len(qs) != 1 or not isinstance(qs[0][1], TAbstract):
        raise UnsupportedMode("one-shot mode needs a specification with a single quantifier over the abstract type")
    try:
        pos, neg = [], []
        for v in engine.en.stream(program.tau_c, engine.options.check_budget.alpha_nodes, engine.options.oneshot_examples):
            try:
                ok = program.spec_holds(v)
            except FuelExhausted:
                ok = False
            (pos if ok else neg).append(v)
        inv = engine.synth(ExampleSet(tuple(pos), tuple(neg)), use_cache=False)
        if inv is None:
            return engine.finish(Outcome(SYNTH_FAILURE, message="no predicate separates the examples"))
        if not engine.recheck(inv):
            return engine.finish(Outcome(REJECTED, inv, bounded=False, message="the candidate failed the re-check"))
        return engine.finish(Outcome(INVARIANT, inv, positives=tuple(pos), negatives=tuple(neg)))
    except _Timeout:
        return engine.finish(Outcome(TIMEOUT))


RUNNERS = {"hanoi": hanoi, "conjstr": run_conj_str, "la": run_la, "oneshot": run_oneshot}


def infer(program, mode: str = "hanoi", options: Options | None = None, synthesizer=None, flags=()) -> Outcome:
    if mode not in RUNNERS:
        raise UnsupportedMode(f"unknown mode `{mode}`")
    engine = Engine(program, options, synthesizer, mode=mode, flags=flags)
    return RUNNERS[mode](engine)

"""Bounded enumerative verifier.

A query holds when its body is true on every tuple produced by the diagonal
product of the quantifier streams, within budget. Validity here is therefore
always "bounded-valid"; counterexamples are genuine.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .enumerate import Enumerator
from .lang.types import Type


@dataclass(frozen=True)
class VerifBudget:
    max_nodes: int
    per_quantifier: int
    total: int

    def __post_init__(self):
        if min(self.max_nodes, self.per_quantifier, self.total) <= 0:
            raise ValueError(f"verifier budget must be positive: {self}")

    def as_tuple(self):
        return (self.max_nodes, self.per_quantifier, self.total)


SINGLE = VerifBudget(30, 3000, 3000)
MULTI = VerifBudget(15, 3000, 30000)


def default_budget(num_quantifiers: int) -> VerifBudget:
    if num_quantifiers < 1:
        raise ValueError("a query needs at least one quantifier")
    return SINGLE if num_quantifiers == 1 else MULTI


@dataclass
class Query:
    quantifiers: Sequence[tuple[str, Type]]
    body: Callable[..., bool]
    budget: VerifBudget | None = None

    def __post_init__(self):
        if not self.quantifiers:
            raise ValueError("a query needs at least one quantifier")
        if self.budget is None:
            self.budget = default_budget(len(self.quantifiers))


@dataclass(frozen=True)
class VerifOutcome:
    counterexample: tuple | None
    checked: int
    bounded: bool = field(default=True)

    @property
    def valid(self) -> bool:
        return self.counterexample is None


def product_stream(en: Enumerator, types: Sequence[Type], budget: VerifBudget) -> Iterator[tuple]:
    """Tuples ordered by total size, ties broken by the leftmost quantifier's position.

    Each quantifier contributes its first ``per_quantifier`` values of at most
    ``max_nodes`` nodes; at most ``total`` tuples are produced.
    """
    streams = [en.sized(t, budget.max_nodes, budget.per_quantifier) for t in types]
    if any(not s for s in streams):
        return
    groups = []
    for s in streams:
        g: dict[int, list] = {}
        for v, n in s:
            g.setdefault(n, []).append(v)
        groups.append(g)
    if len(types) == 1:
        for count, (v, _) in enumerate(streams[0]):
            if count >= budget.total:
                return
            yield (v,)
        return
    mins = [min(g) for g in groups]
    maxs = [max(g) for g in groups]
    k = len(types)
    suffix_min = [0] * (k + 1)
    suffix_max = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + mins[i]
        suffix_max[i] = suffix_max[i + 1] + maxs[i]
    emitted = 0

    def tuples_of_total(i: int, remaining: int):
        if i == k - 1:
            for v in groups[i].get(remaining, ()):
                yield (v,)
            return
        lo = max(mins[i], remaining - suffix_max[i + 1])
        hi = min(maxs[i], remaining - suffix_min[i + 1])
        for s in range(lo, hi + 1):
            grp = groups[i].get(s)
            if not grp:
                continue
            for v in grp:
                for rest in tuples_of_total(i + 1, remaining - s):
                    yield (v, *rest)

    for total in range(suffix_min[0], suffix_max[0] + 1):
        for tup in tuples_of_total(0, total):
            yield tup
            emitted += 1
            if emitted >= budget.total:
                return


def verify(q: Query, en: Enumerator, stats=None, label: str = "verify") -> VerifOutcome:
    """Return the first tuple (in product order) falsifying ``q.body``."""
    start = time.perf_counter()
    checked = 0
    cex = None
    try:
        for tup in product_stream(en, [t for _, t in q.quantifiers], q.budget):
            checked += 1
            if not q.body(*tup):
                cex = tup
                break
        if cex is not None:
            # the counterexample must reproduce
            assert not q.body(*cex), "verifier counterexample did not re-evaluate to false"
        return VerifOutcome(cex, checked)
    finally:
        if stats is not None:
            stats.record_verify(time.perf_counter() - start, label)

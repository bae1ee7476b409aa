import random

import pytest

from repinv.cegis import (
    INVARIANT,
    SPEC_VIOLATION,
    TIMEOUT,
    Engine,
    Options,
    UnsupportedMode,
    cex_list_filter,
    hanoi,
    infer,
)
from repinv.frontend.elaborate import load_source
from repinv.induct import Counterexample, replay
from repinv.lang.values import TRUE, nat
from repinv.synth import TableSynthesizer, make_predicate

from .conftest import ALL, program
from .oracles import L, nodup, py_set_spec, to_list
from .toys import random_toy

VACUOUS = """
type list = Nil | Cons of nat * list
module type S = sig
  type t
  val empty : t
  val push : t -> nat -> t
end
module M : S = struct
  type t = list
  let empty : t = Nil
  let push (l : t) (x : nat) : t = Cons (x, l)
end
spec forall (s : t) . true
"""


def pred(p, src):
    return make_predicate(p, p.parse_predicate(src))


HEAD_NOT_ONE = "fun (l : t) -> match l with Nil -> true | Cons (h, _) -> not (h = 1)"
NODUP = "let rec nd (l : t) : bool = match l with Nil -> true | Cons (h, tl) -> not (lookup tl h) && nd tl in nd"


@pytest.fixture(scope="module")
def vacuous():
    return load_source(VACUOUS, name="vacuous")


# ---------------------------------------------------------------- closed positives


def test_closed_positives_finds_singleton(listset):
    e = Engine(listset)
    r = e.closed_positives([L(), L(3)], pred(listset, HEAD_NOT_ONE))
    assert isinstance(r, Counterexample) and r.V == (L(1),)


def test_closed_positives_vacuous_on_empty(listset):
    assert Engine(listset).closed_positives([], pred(listset, "fun (s : t) -> true")).valid


def test_closed_positives_from_empty_list(listset):
    assert Engine(listset).closed_positives([L()], pred(listset, NODUP)).valid


# ---------------------------------------------------------------- no negatives


def test_no_negatives_true_gives_duplicate_list(listset):
    r = Engine(listset).no_negatives(pred(listset, "fun (s : t) -> true"))
    assert r.kind == "sufficiency"
    (v,) = r.values
    assert not nodup(v)
    assert any(not py_set_spec(to_list(v), i) for i in range(4))


def test_no_negatives_inductive_side(listset):
    e = Engine(listset)
    hd = pred(listset, HEAD_NOT_ONE)
    r = e.checker.check(hd, hd)
    assert all(hd(s) for s in r.S) and not hd(r.value)
    # restricting the inputs to [0] exposes the pair ([0], [1; 0])
    r2 = e.checker.check({L(0)}, hd)
    assert r2.S == (L(0),) and r2.V == (L(1, 0),)


def test_no_negatives_accepts_nodup(listset):
    assert Engine(listset).no_negatives(pred(listset, NODUP)) is None


# ---------------------------------------------------------------- main loop


def test_vacuous_spec_returns_true_first(vacuous):
    o = infer(vacuous)
    assert o.kind == INVARIANT and o.invariant.size == 2
    assert o.stats.tsc == 1 and o.positives == ()


def test_listset_loop_state(listset):
    e = Engine(listset, Options(debug_rank=True))
    o = hanoi(e)
    assert o.kind == INVARIANT
    for v in o.positives:
        assert o.invariant(v)
        assert replay(v, e.registry, listset)
    assert not set(o.positives) & set(o.negatives)


def test_buggy_set_violation_replays():
    p = program("buggyset")
    o = infer(p)
    assert o.kind == SPEC_VIOLATION and o.violation
    assert any("insert" in line for line in o.replays)
    # hand replay: the buggy delete leaves the element in place
    rt = p.runtime
    one = rt.call(p.op("insert"), rt.call(p.op("insert"), L(), nat(1)), nat(1))
    assert rt.call(p.op("lookup"), rt.call(p.op("delete"), one, nat(1)), nat(1)) == TRUE


def test_timeout_outcome(listset):
    o = infer(listset, options=Options(timeout=0.0))
    assert o.kind == TIMEOUT and o.stats.outcome == TIMEOUT


# ---------------------------------------------------------------- counterexample list


def test_cex_list_filter_keeps_accepting_prefix():
    true = lambda v: True  # noqa: E731
    e1 = lambda v: v != "v5x"  # noqa: E731
    e2 = lambda v: v != "v5"  # noqa: E731
    trace = [(true, ("v2",)), (e1, ("v3",)), (e2, ("v4",))]
    resume, kept = cex_list_filter(trace, "v5")
    assert resume == {"v2", "v3"} and kept == trace[:2]


def test_cex_list_filter_nothing_accepts():
    trace = [(lambda v: False, ("v2",))]
    assert cex_list_filter(trace, "v5") == (set(), [])
    assert cex_list_filter([], "v5") == (set(), [])


# ---------------------------------------------------------------- baselines


@pytest.mark.parametrize("mode", ["conjstr", "la"])
def test_baselines_on_vacuous_spec(vacuous, mode):
    o = infer(vacuous, mode)
    assert o.kind == INVARIANT and o.invariant.size == 2


def test_oneshot_vacuous_and_unsupported(vacuous, listset):
    assert infer(vacuous, "oneshot").invariant.size == 2
    with pytest.raises(UnsupportedMode):
        infer(listset, "oneshot")


@pytest.mark.parametrize("mode", ["conjstr", "la"])
def test_baselines_sound_on_listset(listset, mode):
    o = infer(listset, mode)
    assert o.kind == INVARIANT
    assert Engine(listset).recheck(o.invariant)


@pytest.mark.parametrize("name", ALL)
def test_synthesis_cache_never_adds_calls(name):
    p = program(name)
    with_cache = infer(p)
    without = infer(p, options=Options(synth_cache=False))
    assert with_cache.kind == without.kind
    assert with_cache.stats.tsc <= without.stats.tsc
    for o in (with_cache, without):
        if o.kind == INVARIANT:
            assert Engine(p).recheck(o.invariant)


# ---------------------------------------------------------------- finite domains


def _check_toy(toy):
    p = toy.elaborate()
    reach, subsets = toy.ground_truth()
    o = infer(p, options=Options(debug_rank=True), synthesizer=TableSynthesizer(p))
    values = [(f"K{i}",) for i in range(toy.k)]
    if subsets:
        assert o.kind == INVARIANT, toy.source
        accepted = {i for i, v in enumerate(values) if o.invariant(v)}
        assert accepted in subsets
    else:
        assert o.kind == SPEC_VIOLATION, toy.source
        assert not reach <= toy.good


def test_random_finite_toys_small_sample():
    rng = random.Random(7)
    for _ in range(25):
        _check_toy(random_toy(rng))

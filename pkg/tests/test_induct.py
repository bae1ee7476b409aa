import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repinv.frontend.elaborate import load_source
from repinv.induct import (
    ContractLog,
    Counterexample,
    InductivenessChecker,
    PredicateTest,
    SetMembership,
    Valid,
    collect_v,
    cond_inductive,
    diagonal,
    replay,
    wrap_contract,
)
from repinv.lang.types import ALPHA, NAT, TProd
from repinv.lang.values import nat

from .conftest import ALL, program
from .oracles import L, nodup, to_int, to_list

RULES = """
let rec add (a : nat) (b : nat) : nat =
  match a with
  | 0 -> b
  | S a1 -> S (add a1 b)

module type R = sig
  type t
  val mk : t
  val grow : t -> t
  val split : t -> t * t
  val join : t * t -> t
  val size : t -> nat
  val apply : (t -> t) -> t -> t
  val feed : (t -> nat) -> nat
end

module M : R = struct
  type t = nat
  let mk : t = 0
  let grow (x : t) : t = S x
  let split (x : t) : t * t = (x, S (S x))
  let join (p : t * t) : t = match p with (a, b) -> add a b
  let size (x : t) : nat = x
  let apply (f : t -> t) (x : t) : t = f x
  let feed (f : t -> nat) : nat = f 2
end

spec forall (x : t) . true
"""


@pytest.fixture(scope="module")
def rules():
    return load_source(RULES, name="rules", higher_order=True)


@pytest.fixture(scope="module")
def ck(rules):
    return InductivenessChecker(rules)


def rel(*ns):
    return SetMembership([nat(n) for n in ns])


def nat_pred(f):
    return PredicateTest(lambda v: f(to_int(v)))


def well_formed(r, P, Q):
    assert isinstance(r, Counterexample)
    assert len(r.V) == 1
    assert all(P(s) for s in r.S)
    assert not Q(r.value)


# ---------------------------------------------------------------- collection


def test_collect_base_abstract_product():
    assert collect_v(nat(3), NAT) == []
    assert collect_v(nat(3), ALPHA) == [nat(3)]
    v = (",", nat(1), (",", nat(0), nat(2)))
    assert collect_v(v, TProd(ALPHA, TProd(NAT, ALPHA))) == [nat(1), nat(2)]


# ---------------------------------------------------------------- valid rules


def test_base_result_needs_no_check(ck):
    assert "size" not in [n for n, _ in ck.ops]
    r = ck.check(rel(), nat_pred(lambda n: False), ops=("size",))
    assert isinstance(r, Valid)


def test_abstract_result_valid(ck):
    assert ck.check(rel(0, 1), nat_pred(lambda n: n <= 2), ops=("mk", "grow")).valid


def test_product_result_valid(ck):
    assert ck.check(rel(0), nat_pred(lambda n: n <= 2), ops=("split",)).valid


def test_function_argument_valid_when_p_equals_q(ck):
    P = rel(0)
    assert ck.check(P, P, ops=("apply",)).valid


# ---------------------------------------------------------------- counterexample rules


def test_abstract_constant_counterexample(ck):
    Q = nat_pred(lambda n: n >= 1)
    r = ck.check(rel(), Q, ops=("mk",))
    well_formed(r, rel(), Q)
    assert r.S == () and r.V == (nat(0),) and r.witness.op == "mk"


def test_product_left_counterexample(ck):
    P, Q = rel(1), nat_pred(lambda n: n != 1)
    r = ck.check(P, Q, ops=("split",))
    well_formed(r, P, Q)
    assert r.V == (nat(1),) and r.witness.path == (("proj", 1),)


def test_product_right_counterexample(ck):
    P, Q = rel(1), nat_pred(lambda n: n <= 2)
    r = ck.check(P, Q, ops=("split",))
    well_formed(r, P, Q)
    assert r.S == (nat(1),) and r.V == (nat(3),) and r.witness.path == (("proj", 2),)


def test_function_counterexample_collects_argument(ck):
    P, Q = rel(1), nat_pred(lambda n: n <= 1)
    r = ck.check(P, Q, ops=("grow",))
    well_formed(r, P, Q)
    assert r.S == (nat(1),) and r.V == (nat(2),)


def test_product_argument_collects_both_components(ck):
    P, Q = rel(1, 2), nat_pred(lambda n: n <= 2)
    r = ck.check(P, Q, ops=("join",))
    well_formed(r, P, Q)
    assert r.S == (nat(1), nat(2)) and r.V == (nat(3),)


def test_higher_order_argument_counterexample(ck):
    P, Q = rel(1), rel(0)
    r = ck.check(P, Q, ops=("apply",))
    well_formed(r, P, Q)
    # the module hands the client its own argument, which fails Q
    assert r.V == (nat(1),) and r.S == (nat(1),)
    assert r.witness.path[0][0] == "crossing"


def test_crossing_without_inputs(ck):
    Q = nat_pred(lambda n: n <= 1)
    r = ck.check(rel(), Q, ops=("feed",))
    well_formed(r, rel(), Q)
    assert r.S == () and r.V == (nat(2),)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 6), max_size=4), st.sets(st.integers(0, 8), max_size=6))
def test_counterexamples_always_well_formed(ck, ps, qs):
    P, Q = rel(*sorted(ps)), rel(*sorted(qs))
    r = ck.check(P, Q)
    if not r.valid:
        well_formed(r, P, Q)
    else:
        # brute force over the first-order operations
        for p in ps:
            assert p + 1 in qs and p in qs and p + 2 in qs
        for a in ps:
            for b in ps:
                assert a + b in qs
        assert 0 in qs


# ---------------------------------------------------------------- contracts


def test_contract_polarity():
    P, Q = rel(0), rel(1)
    log = ContractLog(P, Q)
    assert wrap_contract(nat(0), ALPHA, log, incoming=True) == nat(0)
    assert log.entered == [nat(0)]
    from repinv.induct import ClientBlame, ModuleBlame

    with pytest.raises(ClientBlame):
        wrap_contract(nat(1), ALPHA, log, incoming=True)
    with pytest.raises(ModuleBlame):
        wrap_contract(nat(0), ALPHA, log, incoming=False)
    # for a function supplied by the client, its argument flows out of the module
    from repinv.lang.types import TArrow

    g = wrap_contract(lambda x: nat(0), TArrow(ALPHA, ALPHA), ContractLog(P, Q), incoming=True)
    with pytest.raises(ModuleBlame):
        g(nat(0))
    assert g(nat(1)) == nat(0)


def test_fold_contract_counterexample():
    fset = program("fset_fold")
    P = SetMembership([L(0)])
    Q = PredicateTest(lambda v: v == L())
    r = InductivenessChecker(fset).check(P, Q, ops=("fold",))
    well_formed(r, P, Q)


def test_fold_alone_never_fails_when_p_equals_q():
    fset = program("fset_fold")
    P = SetMembership([L(), L(0), L(1), L(0, 1)])
    assert InductivenessChecker(fset).check(P, P, ops=("fold",)).valid


@pytest.mark.parametrize("name", [n for n in ALL if not program(n).higher_order])
def test_contract_and_direct_agree(name):
    p = program(name)
    ck = InductivenessChecker(p)
    vals = ck.en.values(p.tau_c, 8, 60)
    for k in (0, 1, 4, 12):
        for P, Q in [
            (SetMembership(vals[:k]), SetMembership(vals[: k + 2])),
            (SetMembership(vals[:k]), PredicateTest(lambda v, k=k: v in vals[: 2 * k + 1])),
        ]:
            assert ck.check(P, Q) == ck.check(P, Q, direct=True)


# ---------------------------------------------------------------- list set


def test_listset_visible_counterexample(listset):
    hd = listset.parse_predicate("fun (l : t) -> match l with Nil -> true | Cons (h, _) -> not (h = 1)")
    from repinv.synth import make_predicate

    Q = make_predicate(listset, hd)
    r = cond_inductive(listset, SetMembership([L(0)]), Q)
    well_formed(r, SetMembership([L(0)]), Q)
    assert r.S == (L(0),) and r.V == (L(1, 0),)


def test_replay_reconstructs_values(listset):
    reg = {}
    ck = InductivenessChecker(listset)
    r1 = ck.check(SetMembership([]), SetMembership([]))
    reg[r1.value] = r1.witness
    r2 = ck.check(SetMembership([r1.value]), SetMembership([r1.value]))
    reg[r2.value] = r2.witness
    steps = replay(r2.value, reg, listset)
    assert len(steps) == 2 and steps[0].startswith("[] = empty")
    with pytest.raises(AssertionError):
        replay(L(5, 5), reg, listset)


def test_nodup_closed_from_empty_matches_brute_force(listset):
    from repinv.synth import make_predicate

    nd = make_predicate(
        listset,
        listset.parse_predicate(
            "let rec nd (l : t) : bool = match l with Nil -> true | Cons (h, tl) -> not (lookup tl h) && nd tl in nd"
        ),
    )
    got = cond_inductive(listset, SetMembership([L()]), nd)
    from .oracles import py_delete, py_insert

    brute = all(nodup(L(*py_insert([], x))) and nodup(L(*py_delete([], x))) for x in range(4))
    assert got.valid == brute is True


def test_diagonal_order():
    got = list(diagonal([[0, 1, 2], ["a", "b"]], 100))
    assert got == [(0, "a"), (0, "b"), (1, "a"), (1, "b"), (2, "a"), (2, "b")]
    assert len(list(diagonal([[1, 2, 3]] * 3, 5))) == 5
    assert list(diagonal([[], [1]], 10)) == []


def test_check_respects_per_op_cap(listset):
    from repinv.induct import CheckBudget

    ck = InductivenessChecker(listset, budget=CheckBudget(per_op=7))
    everything = PredicateTest(lambda v: True)
    r = ck.check(everything, everything)
    assert r.valid and r.checked <= 7 * len(ck.ops)

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repinv.enumerate import Enumerator, FnGrammar, count_values, enum_function_exprs, enum_functions, enum_values
from repinv.lang.evaluator import Runtime
from repinv.lang.types import BOOL, NAT, Datatypes, TNamed, TProd
from repinv.lang.values import nat, value_size
from repinv.verify import MULTI, SINGLE, Query, VerifBudget, default_budget, product_stream, verify

from .oracles import all_nat_lists, to_int, to_list

LIST = TNamed("list")


@pytest.fixture(scope="module")
def dts(listset):
    return listset.dts


@pytest.fixture(scope="module")
def en(dts):
    return Enumerator(dts)


def test_small_streams():
    assert list(enum_values(BOOL, 5, 10)) == [("False",), ("True",)]
    assert list(enum_values(NAT, 3, 10)) == [nat(0), nat(1), nat(2)]


def test_list_stream_prefix(dts):
    got = [to_list(v) for v in enum_values(LIST, 30, 8, dts)]
    assert got == [[], [0], [1], [0, 0], [2], [0, 1], [1, 0], [3]]


@pytest.mark.parametrize("n", [1, 5, 9, 12])
def test_list_counts_match_brute_force(dts, n):
    want = sorted(map(tuple, all_nat_lists(n)))
    got = sorted(tuple(to_list(v)) for v in enum_values(LIST, n, 10**6, dts))
    assert got == want
    assert count_values(LIST, n, dts) == len(want)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 14), st.integers(1, 400))
def test_streams_sorted_unique_and_bounded(en, nodes, count):
    vals = list(en.stream(LIST, nodes, count))
    sizes = [value_size(v) for v in vals]
    assert sizes == sorted(sizes)
    assert len(set(vals)) == len(vals)
    assert len(vals) <= count and all(s <= nodes for s in sizes)
    # a larger budget extends rather than reorders
    assert list(en.stream(LIST, nodes + 2, count + 50))[: len(vals)] == vals


def test_pairs_enumerate_by_total_size(en):
    vals = en.values(TProd(NAT, BOOL), 5, 100)
    assert vals[0] == (",", nat(0), ("False",))
    assert [value_size(v) for v in vals] == sorted(value_size(v) for v in vals)


def test_uninhabited_type_is_empty():
    d = Datatypes()
    d.declare("void", [("V", (TNamed("void"),))])
    assert list(Enumerator(d).stream(TNamed("void"), 10, 10)) == []


def test_function_enumeration(dts):
    exprs = enum_function_exprs(NAT, NAT, FnGrammar(depth=2, max_count=64), dts)
    assert len(exprs) == len(set(exprs)) <= 64
    rt = Runtime()
    fns = enum_functions(NAT, NAT, FnGrammar(depth=2, max_count=64), dts, runtime=rt)
    assert all(f.expr in exprs for f in fns)
    table = {tuple(rt.call(f, nat(i)) for i in range(3)) for f in fns}
    assert (nat(0),) * 3 in table  # constant zero
    assert (nat(0), nat(1), nat(2)) in table  # identity
    assert (nat(1), nat(2), nat(3)) in table  # successor


# ---------------------------------------------------------------- budgets


def test_default_budgets_exact():
    assert default_budget(1).as_tuple() == (30, 3000, 3000)
    assert default_budget(2).as_tuple() == (15, 3000, 30000)
    assert default_budget(3) == MULTI and default_budget(1) == SINGLE
    with pytest.raises(ValueError):
        default_budget(0)
    with pytest.raises(ValueError):
        VerifBudget(0, 1, 1)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 12), st.integers(1, 60), st.integers(1, 500), st.integers(1, 3))
def test_verifier_never_exceeds_budget(en, nodes, per, total, k):
    calls = []

    def body(*xs):
        calls.append(xs)
        return True

    b = VerifBudget(nodes, per, total)
    out = verify(Query([(f"x{i}", LIST) for i in range(k)], body, b), en)
    assert out.valid and out.checked == len(calls) <= total
    for tup in calls:
        for v in tup:
            assert value_size(v) <= nodes
    per_q = set(en.values(LIST, nodes, per))
    assert all(v in per_q for tup in calls for v in tup)
    assert len(set(calls)) == len(calls)


def test_product_order_by_total_size_then_left(en):
    b = VerifBudget(6, 50, 10**6)
    tuples = list(product_stream(en, [LIST, NAT], b))
    keys = [value_size(a) + value_size(c) for a, c in tuples]
    assert keys == sorted(keys)
    streams = [en.values(LIST, 6, 50), en.values(NAT, 6, 50)]
    brute = sorted(
        itertools.product(*streams),
        key=lambda t: (sum(map(value_size, t)), value_size(t[0]), streams[0].index(t[0]), streams[1].index(t[1])),
    )
    assert tuples == brute


def test_verify_returns_first_falsifier(en):
    out = verify(Query([("l", LIST), ("n", NAT)], lambda l, n: to_list(l) != [to_int(n)] * 2), en)
    assert to_list(out.counterexample[0]) == [0, 0] and out.counterexample[1] == nat(0)
    assert not out.valid


def test_verify_records_one_call(en):
    from repinv.stats import RunStats

    s = RunStats()
    verify(Query([("l", LIST)], lambda l: True, VerifBudget(5, 10, 10)), en, stats=s)
    assert s.tvc == 1

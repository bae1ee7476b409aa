"""Independent reference implementations used as test oracles.

Nothing here calls into the object-language evaluator: values are converted to
plain Python data and checked with ordinary Python code.
"""
from __future__ import annotations

import itertools

from repinv.lang.values import nat


def L(*xs):
    """Build a nat-list value from Python ints."""
    v = ("Nil",)
    for x in reversed(xs):
        v = ("Cons", nat(x), v)
    return v


def to_int(v) -> int:
    n = 0
    while v[0] == "S":
        n += 1
        v = v[1]
    assert v == ("Z",)
    return n


def to_list(v) -> list[int]:
    out = []
    while v[0] == "Cons":
        out.append(to_int(v[1]))
        v = v[2]
    assert v == ("Nil",)
    return out


def nodup(v) -> bool:
    xs = to_list(v)
    for i, x in enumerate(xs):
        if x in xs[i + 1:]:
            return False
    return True


def nat_list_ast_size(xs: list[int]) -> int:
    # Cons + nat (n+1 nodes) per element, plus Nil
    return sum(2 + x for x in xs) + 1


def all_nat_lists(max_nodes: int):
    """Every nat list with at most ``max_nodes`` AST nodes, by brute force."""
    out = [[]]
    frontier = [[]]
    while frontier:
        nxt = []
        for xs in frontier:
            for x in itertools.count():
                ys = [x] + xs
                if nat_list_ast_size(ys) > max_nodes:
                    break
                nxt.append(ys)
        out.extend(nxt)
        frontier = nxt
    return out


# python models of the list-set operations
def py_insert(xs, x):
    return xs if x in xs else [x] + xs


def py_delete(xs, x):
    if x in xs:
        i = xs.index(x)
        return xs[:i] + xs[i + 1:]
    return xs


def py_lookup(xs, x):
    return x in xs


def py_set_spec(xs, i):
    return (not py_lookup([], i)) and py_lookup(py_insert(xs, i), i) and not py_lookup(py_delete(xs, i), i)


# finite-state toys
def reachable(consts, unary, binary, k):
    seen = set(consts)
    frontier = list(consts)
    while frontier:
        new = []
        for a in frontier:
            for op in unary:
                b = op[a]
                if b not in seen:
                    seen.add(b)
                    new.append(b)
        for op in binary:
            for a in list(seen):
                for b in list(seen):
                    c = op[a][b]
                    if c not in seen:
                        seen.add(c)
                        new.append(c)
        frontier = new
    return seen


def sufficient_subsets(consts, unary, binary, good, k):
    """All subsets that contain the constants, are closed, and lie inside ``good``."""
    found = []
    for mask in range(1 << k):
        s = {i for i in range(k) if mask >> i & 1}
        if not set(consts) <= s or not s <= good:
            continue
        if any(op[a] not in s for op in unary for a in s):
            continue
        if any(op[a][b] not in s for op in binary for a in s for b in s):
            continue
        found.append(s)
    return found

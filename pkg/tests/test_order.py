import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framelab.errors import BudgetExceeded, MismatchedSpaces, NotMonotone
from framelab.order import (
    Comparison,
    MonotoneMap,
    Poset,
    enumerate_monotone_maps,
    is_lattice,
    is_monotone,
    monotone_tables,
    pointwise_order,
)

FLAT = Poset.from_relation(3, [(0, 1), (0, 2)])
DIAMOND = Poset.from_relation(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


@st.composite
def posets(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    # a strict order compatible with index order, then closed transitively
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    perm = draw(st.permutations(range(n)))
    return Poset.from_relation(n, [(perm[i], perm[j]) for i, j in pairs])


def brute_monotone(dom, cod):
    out = []
    for t in itertools.product(range(cod.size), repeat=dom.size):
        if all(cod.leq(t[i], t[j]) for i in range(dom.size) for j in range(dom.size) if dom.leq(i, j)):
            out.append(t)
    return out


def test_poset_rejects_non_orders():
    with pytest.raises(ValueError):
        Poset([[True, True], [True, True]])
    with pytest.raises(ValueError):
        Poset([[True, False], [False, False]])
    with pytest.raises(ValueError):
        Poset([[True, True, False], [False, True, True], [False, False, True]])


def test_flat_and_diamond_bounds():
    assert FLAT.bottom() == 0 and FLAT.top() is None
    assert DIAMOND.bottom() == 0 and DIAMOND.top() == 3
    assert DIAMOND.lower_covers()[3] == [1, 2]


@given(posets(), posets(3))
@settings(max_examples=60, deadline=None)
def test_monotone_tables_match_filter(dom, cod):
    got = [tuple(int(v) for v in row) for row in monotone_tables(dom, cod)]
    assert got == brute_monotone(dom, cod)


@given(posets(), posets(3))
@settings(max_examples=40, deadline=None)
def test_every_enumerated_table_is_monotone(dom, cod):
    for row in monotone_tables(dom, cod):
        assert is_monotone(row, dom, cod)


def test_flat_self_maps():
    assert len(monotone_tables(FLAT, FLAT)) == 11


def test_monotone_budget():
    with pytest.raises(BudgetExceeded):
        monotone_tables(DIAMOND, DIAMOND, budget=10)


def test_monotone_map_validation():
    with pytest.raises(NotMonotone):
        MonotoneMap(FLAT, FLAT, (1, 0, 0))
    with pytest.raises(ValueError):
        MonotoneMap(FLAT, FLAT, (0, 0))


def test_pointwise_order():
    maps = enumerate_monotone_maps(FLAT, FLAT)
    by = {m.table: m for m in maps}
    assert pointwise_order(by[(0, 0, 0)], by[(0, 1, 2)]) is Comparison.BELOW
    assert pointwise_order(by[(0, 1, 2)], by[(0, 0, 0)]) is Comparison.ABOVE
    assert pointwise_order(by[(1, 1, 1)], by[(2, 2, 2)]) is Comparison.INCOMPARABLE
    assert pointwise_order(by[(1, 1, 1)], by[(1, 1, 1)]) is Comparison.EQUAL
    other = enumerate_monotone_maps(FLAT, Poset.from_relation(3, [(0, 1), (0, 2)]))
    with pytest.raises(MismatchedSpaces):
        pointwise_order(maps[0], other[0])


def test_lattice_checks():
    rep = is_lattice(range(4), DIAMOND)
    assert rep.is_lattice and rep.bottom == 0 and rep.top == 3
    assert not is_lattice([1, 2], DIAMOND).is_lattice
    assert not is_lattice(range(3), FLAT).is_lattice
    assert is_lattice([0, 1], FLAT).is_lattice


@given(st.integers(1, 6))
def test_chains_are_lattices(n):
    chain = Poset.from_relation(n, [(i, i + 1) for i in range(n - 1)])
    rep = is_lattice(range(n), chain)
    assert rep.is_lattice and rep.bottom == 0 and rep.top == n - 1


def brute_is_lattice(p):
    m, n = p.matrix, p.size
    for a, b in itertools.product(range(n), repeat=2):
        ups = [u for u in range(n) if m[a, u] and m[b, u]]
        downs = [u for u in range(n) if m[u, a] and m[u, b]]
        if not any(all(m[u, v] for v in ups) for u in ups):
            return False
        if not any(all(m[v, u] for v in downs) for u in downs):
            return False
    return True


@given(posets(5))
@settings(max_examples=80, deadline=None)
def test_lattice_agrees_with_bound_search(p):
    assert is_lattice(range(p.size), p).is_lattice == brute_is_lattice(p)


def test_dual_view():
    from framelab import build_layer

    layer = build_layer("C", "bool -> bool")
    d = layer.poset.dual()
    for i, j in itertools.product(range(layer.size), repeat=2):
        assert d.leq(i, j) == layer.poset.leq(j, i)
    assert np.array_equal(d.matrix, layer.poset.matrix.T)
    assert d.dual() is layer.poset

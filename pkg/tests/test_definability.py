import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from framelab.calculus import parse_term, pretty
from framelab.definability import (
    macro,
    or_class_size,
    saturate_definables,
    synthesize_S,
    synthesize_eq_S,
    totality_class,
    totality_classes,
    verify_macro,
)
from framelab.errors import TypeMismatch
from framelab.frames import build_layer, element_of_table
from framelab.semantics import interpret
from framelab.simpletypes import BOOL, parse_type

S_TYPES = ["bool", "bool -> bool", "bool -> bool -> bool", "(bool -> bool) -> bool", "bool -> bool -> bool -> bool"]
BOT, TT, FF = 0, 1, 2


@pytest.mark.parametrize("ty", S_TYPES)
def test_every_set_element_is_synthesized(ty):
    layer = build_layer("S", ty)
    for el in layer.elements():
        res = synthesize_S(el)
        assert res.verified
        assert interpret(res.term, "S") == el
        assert res.term.type == parse_type(ty)


@given(st.sampled_from(S_TYPES[:4]), st.data())
@settings(max_examples=40, deadline=None)
def test_synthesized_terms_agree_with_reference(ty, data):
    layer = build_layer("S", ty)
    el = layer.element(data.draw(st.integers(0, layer.size - 1)))
    term = synthesize_S(el).term
    assert oracles.denotation_index(term, "S") == el.index
    assert pretty(parse_term(pretty(term))) == pretty(term)


def test_equality_at_bool_is_the_textbook_term():
    textbook = parse_term(r"\x:bool. \y:bool. if x (if y true false) (if y false true)")
    ours = synthesize_eq_S("bool")
    assert interpret(ours, "S") == interpret(textbook, "S")
    layer = build_layer("S", "bool -> bool -> bool")
    assert interpret(textbook, "S").table == tuple(layer.res.index_of(row) for row in ([0, 1], [1, 0]))


@pytest.mark.parametrize("ty", ["bool -> bool", "(bool -> bool) -> bool", "bool -> bool -> bool"])
def test_equality_predicates(ty):
    from framelab.calculus import apps

    eq = synthesize_eq_S(ty)
    layer = build_layer("S", ty)
    picks = range(0, layer.size, max(1, layer.size // 5))
    for a, b in itertools.product(picks, repeat=2):
        x, y = synthesize_S(layer.element(a)).term, synthesize_S(layer.element(b)).term
        assert interpret(apps(eq, x, y), "S").literal() == ("tt" if a == b else "ff")


def test_synthesizer_rejects_other_frames():
    with pytest.raises(TypeMismatch):
        synthesize_S(build_layer("C", "bool").element(0))


# definable sets ----------------------------------------------------------------------


def c_table(f, n):
    """Layer element of the C function ``f`` on n arguments (None is bot)."""
    ty = parse_type(" -> ".join(["bool"] * (n + 1)))
    code = {None: BOT, True: TT, False: FF}
    dec = {BOT: None, TT: True, FF: False}
    inputs = list(itertools.product((BOT, TT, FF), repeat=n))
    return oracles.table_index("C", ty, inputs, [code[f(*[dec[v] for v in x])] for x in inputs])


def strict_or(x, y):
    return None if x is None or y is None else x or y


def left_or(x, y):
    return None if x is None else True if x else y


def right_or(x, y):
    return left_or(y, x)


def parallel_or(x, y):
    if x is True or y is True:
        return True
    return False if x is False and y is False else None


def test_sequential_disjunctions_are_definable_but_por_is_not():
    d = saturate_definables("lambdaS", "C", "bool -> bool -> bool")
    found = d[parse_type("bool -> bool -> bool")]
    assert found.exact and len(found.elements) == 58 and found.layer_size == 197
    for f in (strict_or, left_or, right_or):
        assert c_table(f, 2) in found.elements
    assert c_table(parallel_or, 2) not in found.elements
    assert len(d[parse_type("bool -> bool")].elements) == 6
    assert len(d[BOOL].elements) == 2


def test_flat_frame_is_fully_complete_for_por_calculus():
    d = saturate_definables("lambdaC", "C", "(bool -> bool) -> bool")
    for ty, s in d.items():
        assert s.complete, ty
    w = saturate_definables("lambdaC", "C", "bool -> bool")[parse_type("bool -> bool")]
    for i, t in w.witnesses.items():
        assert interpret(t, "C").index == i


def test_higher_order_definables_are_lower_bounds():
    d = saturate_definables("lambdaS", "S", "((bool -> bool) -> bool) -> bool", depth=3, verify=False)
    top = d[parse_type("((bool -> bool) -> bool) -> bool")]
    assert not top.exact and top.depth == 3
    assert d[parse_type("(bool -> bool) -> bool")].exact


# totality --------------------------------------------------------------------------


def test_unary_totality_classes():
    rep = totality_classes("bool -> bool")
    assert sorted(len(c.fiber) for c in rep.classes) == [1, 1, 2, 2]
    assert len(rep.residue) == 5
    assert all(c.lattice.is_lattice and c.information.is_lattice for c in rep.classes)


def test_disjunction_class():
    rep = totality_classes("bool -> bool -> bool")
    s = build_layer("S", "bool -> bool -> bool")
    s_or = element_of_table(s, [s.res.index_of([0, 0]), s.res.index_of([0, 1])])
    cls = rep.class_of(s_or)
    assert sorted(cls.fiber) == sorted(c_table(f, 2) for f in (strict_or, left_or, right_or, parallel_or))
    # eagerness order: parallel-or is least, strict-or greatest
    assert cls.lattice.is_lattice
    assert cls.lattice.bottom == c_table(parallel_or, 2)
    assert cls.lattice.top == c_table(strict_or, 2)
    assert cls.information.bottom == c_table(strict_or, 2)
    assert cls.information.top == c_table(parallel_or, 2)
    assert len(rep.classes) == 16 and all(c.lattice.is_lattice for c in rep.classes)


def test_higher_order_totality_classes_are_lattices():
    rep = totality_classes("(bool -> bool) -> bool")
    assert len(rep.classes) == 16
    assert all(c.lattice.is_lattice and c.information.is_lattice for c in rep.classes)


def brute_or_class(n):
    """C implementations of n-ary disjunction, by filtering the whole layer."""
    ty = parse_type(" -> ".join(["bool"] * (n + 1)))
    tabs, _ = oracles.layer("C", ty)

    def value(i, t, args):
        if not args:
            return oracles.GROUND["C"][i]
        row = tabs_at(t)[i]
        return value(int(row[oracles.GROUND["C"].index(args[0])]), t.res, args[1:])

    def tabs_at(t):
        return oracles.layer("C", t)[0]

    count = 0
    for i in range(len(tabs)):
        if all(value(i, ty, list(a)) == (TT if TT in a else FF) for a in itertools.product((TT, FF), repeat=n)):
            count += 1
    return count


@pytest.mark.parametrize("n, size", [(1, 1), (2, 4)])
def test_or_class_sizes(n, size):
    assert or_class_size(n) == size == brute_or_class(n)


@pytest.mark.slow
def test_ternary_or_class():
    ty = parse_type("bool -> bool -> bool -> bool")
    tabs, _ = oracles.layer("C", ty)
    # vectorized filter over the reference layer: follow the curried tables
    t1 = tabs
    t2 = oracles.layer("C", ty.res)[0]
    t3 = oracles.layer("C", ty.res.res)[0]
    ok = np.ones(len(t1), dtype=bool)
    g = oracles.GROUND["C"]
    for a in itertools.product((TT, FF), repeat=3):
        i2 = t1[:, g.index(a[0])]
        i3 = t2[i2, g.index(a[1])]
        out = t3[i3, g.index(a[2])]
        ok &= out == g.index(TT if TT in a else FF)
    assert or_class_size(3) == int(ok.sum()) == 621


def test_totality_class_requires_set_element():
    with pytest.raises(TypeMismatch):
        totality_class(build_layer("C", "bool").element(0))


@pytest.mark.parametrize("name", ["not", "pand", "pif"])
def test_macros(name):
    assert verify_macro(name)
    assert macro(name).type.order <= 1

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from framelab.calculus import enumerate_closed_terms, get_signature, parse_term, reduce
from framelab.errors import MissingConstantInterpretation, ModelConditionFailed, TypeMismatch, UnboundVariable
from framelab.frames import BOT, FF, TOP, TT, build_layer, ground_element
from framelab.semantics import (
    canonical_constants,
    sound_interpretations,
    uncurried_tables,
    interpret,
    is_monotone_table,
    unique_sound_constant,
    validate_delta_soundness,
)
from framelab.simpletypes import BOOL, parse_type

MODELS = [("lambdaS", "S"), ("lambdaS", "C"), ("lambdaS", "E"), ("lambdaC", "C"), ("lambdaC", "L")]
TYPES = ["bool", "bool -> bool", "bool -> bool -> bool", "(bool -> bool) -> bool"]


def corpus(sig, family, ty, d):
    return [(t, family) for t in enumerate_closed_terms(sig, ty, d)]


NORMAL = []
for sig, fam in MODELS:
    for ty in TYPES:
        if fam == "L" and ty.startswith("("):
            continue
        NORMAL += corpus(sig, fam, ty, 5 if ty != "bool" else 4)


@given(st.sampled_from(NORMAL))
@settings(max_examples=400, deadline=None)
def test_interpretation_matches_reference(case):
    term, fam = case
    assert interpret(term, fam).index == oracles.denotation_index(term, fam)


def _redex_terms(sig):
    s = get_signature(sig)
    terms = oracles.brute_terms(s, (), BOOL, 4, [BOOL, parse_type("bool -> bool")])
    return [(t, sig) for t in terms]


REDEXES = _redex_terms("lambdaS") + _redex_terms("lambdaC")


@given(st.sampled_from(REDEXES))
@settings(max_examples=300, deadline=None)
def test_reduction_preserves_denotation(case):
    term, sig = case
    nf = reduce(term, sig).term
    for s, fam in MODELS:
        if s == sig or (sig == "lambdaS" and fam == "L"):
            assert interpret(term, fam) == interpret(nf, fam)


def test_example_four_in_the_diamond():
    t = parse_term(r"\x:bool. if x omega omega", "lambdaC")
    el = interpret(t, "L")
    assert el.literal() == {"0": "bot", "1": "bot", "2": "bot", "3": "top"}
    omega = parse_term(r"\x:bool. omega", "lambdaC")
    assert interpret(t, "C") == interpret(omega, "C")
    assert interpret(t, "L") != interpret(omega, "L")


def test_environment():
    t = parse_term("if x y false", "lambdaS", context={"x": BOOL, "y": BOOL})
    env = {"x": ground_element("C", TT), "y": ground_element("C", BOT)}
    assert interpret(t, "C", env).literal() == "bot"
    with pytest.raises(UnboundVariable):
        interpret(t, "C", {"x": ground_element("C", TT)})
    with pytest.raises(TypeMismatch):
        interpret(t, "C", {"x": ground_element("E", TT), "y": ground_element("E", TT)})


def test_missing_constants():
    with pytest.raises(MissingConstantInterpretation):
        interpret(parse_term("omega", "lambdaC"), "S")
    with pytest.raises(MissingConstantInterpretation):
        validate_delta_soundness("lambdaC", "S")
    with pytest.raises(MissingConstantInterpretation):
        validate_delta_soundness("lambdaC", "E")


def test_closures_are_applied_lazily():
    # the L layer at (bool -> bool) -> bool is over budget; it must never be built
    t = parse_term(r"(\f:(bool -> bool) -> bool. f (\x:bool. x)) (\g:bool -> bool. g true)")
    assert interpret(t, "L").literal() == "tt"


@pytest.mark.parametrize("sig, fam", MODELS)
def test_delta_soundness(sig, fam):
    rep = validate_delta_soundness(sig, fam)
    assert rep.passed and all(rep.constants_in_frame.values())
    n = {"S": 4, "C": 9, "E": 9, "L": 16}[fam]
    counts = [r.instantiations for r in rep.rules]
    assert counts[:2] == [n, n]
    if sig == "lambdaC":
        g = {"C": 3, "L": 4}[fam]
        assert counts[2:] == [g, g, 1]
    assert rep.to_dict()["passed"] is True


POR_TABLE = {  # rows and columns in the order bot, ff, tt, top
    BOT: (BOT, BOT, TT, TT),
    FF: (BOT, FF, TT, TOP),
    TT: (TT, TT, TT, TT),
    TOP: (TT, TOP, TT, TOP),
}


def test_por_is_unique_and_matches_table():
    found = unique_sound_constant("por", "lambdaC", "L")
    assert len(found) == 1
    cols = (BOT, FF, TT, TOP)
    got = {}
    el = found[0]
    vals = build_layer("L", "bool").family.values
    for d in cols:
        row = el(ground_element("L", d))
        got[d] = tuple(vals[row(ground_element("L", e)).index] for e in cols)
    assert got == POR_TABLE
    assert found[0] == interpret(parse_term("por", "lambdaC"), "L")


def test_por_unique_in_flat_frame():
    found = unique_sound_constant("por", "lambdaC", "C")
    assert len(found) == 1
    assert found[0] == interpret(parse_term("por", "lambdaC"), "C")
    assert unique_sound_constant("true", "lambdaS", "S")[0].literal() == "tt"


def test_por_mutations_are_caught():
    base = canonical_constants("L")
    por = base.table("por").copy()
    # (top, ff) -> top is monotone but breaks  por M true -> true  at M = top
    bad = por.copy()
    bad[3, 1] = 3
    rep = validate_delta_soundness("lambdaC", "L", base.with_table("por", bad))
    assert not rep.passed and rep.constants_in_frame["por"]
    assert [r.rule for r in rep.failing()] == ["por M true -> true"]
    # (top, bot) -> top leaves every rule instance intact but is not monotone
    bad = por.copy()
    bad[3, 0] = 3
    rep = validate_delta_soundness("lambdaC", "L", base.with_table("por", bad))
    assert not rep.passed and not rep.constants_in_frame["por"]
    assert not is_monotone_table(bad, build_layer("L", "bool").family)
    with pytest.raises(ModelConditionFailed):
        interpret(parse_term(r"\x:bool. \y:bool. por x y", "lambdaC"), "L", constants=base.with_table("por", bad))


def test_if_mutation_in_flat_frame():
    base = canonical_constants("C")
    tab = base.table("if").copy()
    tab[1, 1, 2] = 2  # if true tt ff = ff
    rep = validate_delta_soundness("lambdaS", "C", base.with_table("if", tab))
    assert [r.rule for r in rep.failing()] == ["if true M N -> M"]
    assert rep.failing()[0].counterexample is not None


def test_ground_constants():
    for fam in "SCEL":
        c = canonical_constants(fam)
        assert build_layer(fam, "bool").family.values[int(c.table("true"))] == TT
        assert build_layer(fam, "bool").family.values[int(c.table("false"))] == FF
    assert int(canonical_constants("L").table("omega")) == 0
    assert np.asarray(canonical_constants("E").table("if")).shape == (3, 3, 3)


@pytest.mark.parametrize(
    "name, sig, fam", [("por", "lambdaC", "L"), ("por", "lambdaC", "C"), ("if", "lambdaS", "S"), ("if", "lambdaS", "C"), ("if", "lambdaS", "E")]
)
def test_row_search_matches_layer_search(name, sig, fam):
    rows = sound_interpretations(name, sig, fam, limit=100)
    whole = unique_sound_constant(name, sig, fam)
    assert rows.count == len(whole) and rows.canonical_sound
    tabs = uncurried_tables(build_layer(fam, whole[0].type))
    assert sorted(np.asarray(t).tolist() for t in rows.sample) == sorted(tabs[el.index].tolist() for el in whole)


def test_conditional_is_not_unique_in_the_diamond():
    # rows tt and ff are pinned; row bot is any map below the meet of the
    # arguments and row top any map above their join
    g = oracles.GROUND["L"]
    leq = np.array([[oracles.ground_leq("L", a, b) for b in g] for a in g])
    outer = oracles.layer("L", parse_type("bool -> bool -> bool"))[0]
    inner = oracles.layer("L", parse_type("bool -> bool"))[0]
    vals = inner[outer]  # (n, a, b) -> position of f a b
    a = np.arange(4)[:, None]
    b = np.arange(4)[None, :]
    lower = (leq[vals, a] & leq[vals, b]).all(axis=(1, 2)).sum()
    upper = (leq[a, vals] & leq[b, vals]).all(axis=(1, 2)).sum()
    found = sound_interpretations("if", "lambdaC", "L")
    assert found.count == lower * upper == 1296
    assert found.canonical_sound and len(found.sample) == 16

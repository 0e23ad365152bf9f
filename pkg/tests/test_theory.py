import pytest

from framelab.calculus import parse_term
from framelab.errors import MissingConstantInterpretation
from framelab.semantics import interpret
from framelab.simpletypes import parse_type
from framelab.theory import compare_theories, denotation, find_separating_pair

TYPES = ["bool", "bool -> bool", "bool -> bool -> bool", "(bool -> bool) -> bool"]


def same_semantics(pair, left, right, families, sig):
    a, b = parse_term(left, sig), parse_term(right, sig)
    return all(
        denotation(pair.left, f) == denotation(a, f) and denotation(pair.right, f) == denotation(b, f)
        for f in families
    )


def test_sequential_collapse_theory_inclusion():
    rep = compare_theories("lambdaS", "C", "S", 5, TYPES)
    assert rep.inclusion_holds and not rep.violations
    assert rep.strict
    assert any(
        same_semantics(w, r"\x:bool. true", r"\x:bool. if x true true", "CS", "lambdaS") for w in rep.witnesses
    )
    for w in rep.witnesses:
        assert w.verify()


def test_diamond_theory_inclusion():
    rep = compare_theories("lambdaC", "L", "C", 5, TYPES)
    assert rep.inclusion_holds
    assert any(
        same_semantics(w, r"\x:bool. omega", r"\x:bool. if x omega omega", "LC", "lambdaC") for w in rep.witnesses
    )
    # the (bool -> bool) -> bool layer of L is over budget; denotations are compared by their graphs
    assert rep.terms[parse_type(TYPES[3])] == 678


def test_flat_and_dual_flat_share_their_theory():
    rep = compare_theories("lambdaS", "C", "E", 5, TYPES[:3])
    assert rep.inclusion_holds and not rep.strict
    back = compare_theories("lambdaS", "E", "C", 5, TYPES[:3])
    assert back.inclusion_holds and not back.strict


def test_reverse_direction_reports_violations():
    rep = compare_theories("lambdaS", "S", "C", 5, ["bool -> bool"])
    assert not rep.inclusion_holds
    d = rep.to_dict()
    assert d["violation_count"] == len(rep.violations) > 0
    assert d["violations"][0]["equal_in"]["family"] == "S"


def test_find_separating_pair():
    pair = find_separating_pair("lambdaS", "C", "S", 5, "bool -> bool")
    assert pair is None
    left, right = find_separating_pair("lambdaS", "S", "C", 5, "bool -> bool")
    assert interpret(left, "S") == interpret(right, "S")
    assert interpret(left, "C") != interpret(right, "C")
    left, right = find_separating_pair("lambdaC", "C", "L", 5, "bool -> bool")
    assert interpret(left, "C") == interpret(right, "C") and interpret(left, "L") != interpret(right, "L")


def test_models_are_checked():
    with pytest.raises(MissingConstantInterpretation):
        compare_theories("lambdaC", "C", "S", 3)

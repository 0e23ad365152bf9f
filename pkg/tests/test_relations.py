import itertools

import numpy as np
import pytest

import oracles
from framelab.errors import FamilyMismatch, PreconditionFailed
from framelab.frames import Family, build_layer
from framelab.relations import (
    E_BOOL,
    TOTALITY,
    COLLAPSE_ARROWS,
    Entry,
    Relation,
    Verdict,
    certify_collapse,
    certify_iso,
    check_fundamental_property,
    check_partial_function,
    check_surjective,
    compose,
    frame_relation,
    lift_logical,
    term_induced_relation,
)
from framelab.simpletypes import BOOL, parse_type, types_up_to

TYPES = [str(t) for t in types_up_to()]
VAL = {"bot": 0, "tt": 1, "ff": 2, "top": 3}


def brute_lift(ground, source, target, ty):
    """Logical relation by its definition, over the reference layers."""
    if ty == BOOL:
        gs, gt = oracles.GROUND[source], oracles.GROUND[target]
        return {(gs.index(VAL[a]), gt.index(VAL[b])) for a, b in ground}
    sub = brute_lift(ground, source, target, ty.arg)
    res = brute_lift(ground, source, target, ty.res)
    ft, gt = oracles.layer(source, ty)[0], oracles.layer(target, ty)[0]
    return {
        (f, g)
        for f in range(len(ft))
        for g in range(len(gt))
        if all((int(ft[f, x]), int(gt[g, y])) in res for x, y in sub)
    }


@pytest.mark.parametrize("ty", ["bool", "bool -> bool", "bool -> bool -> bool", "(bool -> bool) -> bool"])
@pytest.mark.parametrize(
    "ground, source, target",
    [
        ([("tt", "tt"), ("ff", "ff"), ("bot", "top")], "C", "E"),
        ([("tt", "tt"), ("ff", "ff")], "C", "S"),
        ([("tt", "tt"), ("ff", "ff")], "E", "S"),
    ],
)
def test_lifting_matches_definition(ground, source, target, ty):
    t = parse_type(ty)
    rel = lift_logical(ground, source, target, t)
    got = {tuple(p) for p in rel.pairs(t).tolist()}
    assert got == brute_lift(ground, source, target, t)


def test_lifted_ground_pairs_are_validated():
    with pytest.raises(ValueError):
        lift_logical([("bot", "bot")], "C", "S", "bool")
    rel = lift_logical(E_BOOL, "C", "E", "bool -> bool")
    assert rel.inverse().source is Family.E
    assert rel.provenance["ground_pairs"] == [["bot", "top"], ["tt", "tt"], ["ff", "ff"]]


def test_contains_beyond_matrix_limit(monkeypatch):
    import framelab.relations as r

    rel = r.LiftedRelation(E_BOOL, "C", "E")
    t = parse_type("bool -> bool -> bool")
    full = rel.matrix(t)
    small = r.LiftedRelation(E_BOOL, "C", "E")
    monkeypatch.setattr(r, "MATRIX_CELLS", 100)
    rng = np.random.default_rng(1)
    for x, y in rng.integers(0, 197, size=(300, 2)):
        assert small.contains(t, int(x), int(y)) == bool(full[x, y])
    for x, y in np.argwhere(full)[:50]:
        assert small.contains(t, int(x), int(y))


def test_iso_certificate():
    cert = certify_iso(E_BOOL, "C", "E", TYPES)
    assert cert.certified
    assert [v.sizes for v in cert.per_type] == [(3, 3), (11, 11), (397, 397), (197, 197)]
    d = cert.to_dict()
    assert d["schema"] == 1 and d["certified"] is True


def test_iso_order_reversal_against_reference():
    t = parse_type("bool -> bool")
    pairs = brute_lift([("tt", "tt"), ("ff", "ff"), ("bot", "top")], "C", "E", t)
    phi = dict(pairs)
    lc, le = oracles.layer("C", t)[1], oracles.layer("E", t)[1]
    for x, y in itertools.product(phi, repeat=2):
        assert lc[x, y] == le[phi[y], phi[x]]


def test_iso_fails_without_the_extra_pair():
    cert = certify_iso(TOTALITY, "C", "S", TYPES)
    assert not cert.certified
    bad = cert.per_type[1]
    assert not bad.bijection and bad.sizes == (11, 4)


def test_partial_function_and_surjectivity_checks():
    rel = Relation("C", "S", {"kind": "test"})
    rel.entries[BOOL] = Entry(np.array([[1, 0], [1, 1], [2, 1]]), True, True)
    pf = check_partial_function(rel)[BOOL]
    assert pf.verdict is Verdict.NO and pf.counterexample == (1, 0, 1)
    rel.entries[BOOL] = Entry(np.array([[1, 0]]), True, True)
    sj = check_surjective(rel)[BOOL]
    assert sj.verdict is Verdict.NO and sj.unhit == [1]
    rel.entries[BOOL] = Entry(np.array([[1, 0]]), False, False)
    assert check_surjective(rel)[BOOL].verdict is Verdict.UNDECIDED
    assert check_partial_function(rel)[BOOL].verdict is Verdict.UNDECIDED


def test_failed_collapse_carries_counterexample():
    rel = Relation("C", "S", {"kind": "test"})
    rel.entries[BOOL] = Entry(np.array([[0, 0], [0, 1], [1, 0], [2, 1]]), True, True)
    cert = certify_collapse("C", "S", rel, ["bool"])
    assert not cert.certified and cert.failures == ["bool"]
    cex = cert.to_dict()["types"][0]["partial_function"]["counterexample"]
    assert cex == {"x": "bot", "y": "tt", "y_prime": "ff"}
    with pytest.raises(FamilyMismatch):
        certify_collapse("L", "S", rel, ["bool"])


def test_composition_matches_definition():
    t = parse_type("bool -> bool")
    a = lift_logical(E_BOOL, "C", "E", t)
    b = lift_logical(TOTALITY, "E", "S", t)
    ab = compose(a, b)
    want = {(x, z) for x, y in a.pairs(t).tolist() for y2, z in b.pairs(t).tolist() if y == y2}
    assert {tuple(p) for p in ab.pairs(t).tolist()} == want
    with pytest.raises(FamilyMismatch):
        compose(a, a)


@pytest.mark.parametrize("ty", ["bool -> bool", "bool -> bool -> bool", "(bool -> bool) -> bool"])
def test_generators_agree(ty):
    t = parse_type(ty)
    exact = term_induced_relation("lambdaS", "C", "S", t, "saturation")
    synth = term_induced_relation("lambdaS", "C", "S", t, "synthesizer")
    corpus = term_induced_relation("lambdaS", "C", "S", t, ("depth", 5))
    full = {tuple(p) for p in exact.pairs(t).tolist()}
    assert {tuple(p) for p in synth.pairs(t).tolist()} <= full
    assert {tuple(p) for p in corpus.pairs(t).tolist()} <= full
    assert set(synth.entry(t).hit().tolist()) == set(range(build_layer("S", t).size))


def test_flat_to_set_induced_relation():
    t = parse_type("bool -> bool")
    rel = frame_relation("C", "S")
    assert len(rel.pairs(t)) == 6
    assert rel.entry(t).exact


def test_certificates_for_cheap_arrows():
    for src, tgt in COLLAPSE_ARROWS:
        if src == "L":
            continue
        cert = certify_collapse(src, tgt, frame_relation(src, tgt))
        assert cert.certified and not cert.undecided, (src, tgt)


@pytest.mark.slow
def test_diamond_arrows():
    rel = frame_relation("L", "C")
    assert len(rel.pairs("bool -> bool")) == 20
    cert = certify_collapse("L", "C", rel)
    assert cert.certified
    v = cert.verdict("(bool -> bool) -> bool")
    assert v.method == "target-definability" and v.partial_function.method == "lemma"
    assert v.surjective.verdict is Verdict.YES
    for tgt in ("E", "S"):
        assert certify_collapse("L", tgt, frame_relation("L", tgt)).certified
    composed = compose(frame_relation("L", "C"), frame_relation("C", "S"))
    assert np.array_equal(composed.pairs("bool -> bool"), frame_relation("L", "S").pairs("bool -> bool"))


@pytest.mark.parametrize(
    "ground, source, target, sig",
    [(E_BOOL, "C", "E", "lambdaS"), (TOTALITY, "C", "S", "lambdaS"), (TOTALITY, "E", "S", "lambdaS")],
)
def test_fundamental_property(ground, source, target, sig):
    rel = lift_logical(ground, source, target, "(bool -> bool) -> bool")
    for t in types_up_to():
        rel.entry(t)
    rep = check_fundamental_property(rel, sig, depth=5)
    assert rep.passed and rep.terms_checked > 100 and rep.ground_constants_distinct


def test_fundamental_property_precondition():
    rel = lift_logical([("tt", "tt")], "C", "S", "bool -> bool")
    with pytest.raises(PreconditionFailed) as exc:
        check_fundamental_property(rel, "lambdaS", depth=3)
    assert "false" in exc.value.offending
    rep = check_fundamental_property(rel, "lambdaS", depth=3, strict=False)
    assert not rep.passed and rep.violations

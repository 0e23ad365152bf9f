"""Binary relations between frames: logical lifting, term-induced relations,
composition, and certificates for collapses and isomorphisms."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .calculus.enumeration import enumerate_closed_terms
from .calculus.signatures import get_signature
from .calculus.terms import Const, pretty
from .closure import DEFAULT_WORK, saturate
from .errors import BudgetExceeded, FamilyMismatch, PreconditionFailed
from .frames import BOT, FF, TOP, TT, VALUE_NAMES, Family, build_layer, default_budget, parse_family
from .semantics import canonical_constants, interpret
from .simpletypes import BOOL, SimpleType, parse_type, subtypes, types_up_to

MATRIX_CELLS = 50_000_000

E_BOOL = ((TT, TT), (FF, FF), (BOT, TOP))
TOTALITY = ((TT, TT), (FF, FF))


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided-at-budget"


def _ty(t) -> SimpleType:
    return parse_type(t) if isinstance(t, str) else t


def _ground_value(v) -> int:
    if isinstance(v, str):
        return VALUE_NAMES.index(v.strip().lower())
    return int(v)


@dataclass
class Entry:
    """The pairs of a relation at one type.

    ``exact`` means the pairs are the whole relation; ``targets_exact`` means
    the set of hit targets is known exactly even if source sides are not.
    ``pairs`` is ``None`` when they could not be computed within budget;
    ``targets`` may still record the hit targets in that case.
    """

    pairs: Optional[np.ndarray]
    exact: bool
    targets_exact: bool = False
    method: str = ""
    note: str = ""
    targets: Optional[np.ndarray] = None

    def hit(self) -> Optional[np.ndarray]:
        if self.pairs is not None:
            return np.unique(self.pairs[:, 1])
        return self.targets


class Relation:
    """A type-indexed set of (source index, target index) pairs."""

    def __init__(self, source, target, provenance: dict, entries: Optional[dict] = None, budget=None):
        self.source = parse_family(source)
        self.target = parse_family(target)
        self.provenance = provenance
        self.entries: dict = dict(entries or {})
        self.budget = budget or default_budget()

    def __repr__(self):
        return f"Relation({self.source.value}->{self.target.value}, {self.provenance.get('kind')})"

    def entry(self, ty) -> Entry:
        return self.entries[_ty(ty)]

    def types(self) -> list:
        return list(self.entries)

    def pairs(self, ty) -> np.ndarray:
        e = self.entry(ty)
        if e.pairs is None:
            raise BudgetExceeded(f"relation at {ty}", self.budget, e.note)
        return e.pairs

    def contains(self, ty, x: int, y: int) -> bool:
        p = self.pairs(ty)
        return bool(((p[:, 0] == x) & (p[:, 1] == y)).any())

    def inverse(self) -> "Relation":
        entries = {}
        for ty, e in self.entries.items():
            pairs = None if e.pairs is None else _sorted_pairs(e.pairs[:, ::-1])
            entries[ty] = Entry(pairs, e.exact, e.exact, e.method, e.note)
        prov = {"kind": "inverse", "of": self.provenance}
        return Relation(self.target, self.source, prov, entries, self.budget)

    def with_pairs(self, ty, pairs, exact: bool = True) -> "Relation":
        """A copy with the pairs at ``ty`` replaced (other types unchanged)."""
        out = Relation(self.source, self.target, {"kind": "edited", "of": self.provenance}, self.entries, self.budget)
        for t in self.types():
            out.entries[t] = self.entry(t)
        out.entries[_ty(ty)] = Entry(_sorted_pairs(np.asarray(pairs, dtype=np.int64).reshape(-1, 2)), exact, exact, "edited")
        return out


def _sorted_pairs(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.int64).reshape(-1, 2)
    if len(p) == 0:
        return p
    return np.unique(p, axis=0)


# logical lifting -----------------------------------------------------------------


class LiftedRelation(Relation):
    """The logical relation generated by a ground relation, computed on demand."""

    def __init__(self, ground_pairs, source, target, budget=None):
        source, target = parse_family(source), parse_family(target)
        ground = []
        for a, b in ground_pairs:
            va, vb = _ground_value(a), _ground_value(b)
            if not source.has(va) or not target.has(vb):
                raise ValueError(f"ground pair ({VALUE_NAMES[va]}, {VALUE_NAMES[vb]}) is not in {source.value} x {target.value}")
            ground.append((source.index(va), target.index(vb)))
        names = [[VALUE_NAMES[source.values[a]], VALUE_NAMES[target.values[b]]] for a, b in sorted(set(ground))]
        super().__init__(source, target, {"kind": "lifted-logical", "ground_pairs": names}, budget=budget)
        self.ground = sorted(set(ground))
        self._mats: dict = {}

    def layers(self, ty):
        return build_layer(self.source, ty, self.budget), build_layer(self.target, ty, self.budget)

    def matrix(self, ty) -> np.ndarray:
        ty = _ty(ty)
        if ty in self._mats:
            return self._mats[ty]
        m_layer, n_layer = self.layers(ty)
        if m_layer.size * n_layer.size > MATRIX_CELLS:
            raise BudgetExceeded(f"relation matrix at {ty}", MATRIX_CELLS, f"{m_layer.size} x {n_layer.size}")
        if ty == BOOL:
            out = np.zeros((m_layer.size, n_layer.size), dtype=bool)
            for a, b in self.ground:
                out[a, b] = True
        else:
            sub = self.pairs(ty.arg)
            res = self.matrix(ty.res)
            out = np.ones((m_layer.size, n_layer.size), dtype=bool)
            mt, nt = m_layer.tables.astype(np.int64), n_layer.tables.astype(np.int64)
            for x, y in sub:
                out &= res[np.ix_(mt[:, x], nt[:, y])]
        self._mats[ty] = out
        return out

    def entry(self, ty) -> Entry:
        ty = _ty(ty)
        if ty not in self.entries:
            pairs = np.argwhere(self.matrix(ty)).astype(np.int64)
            self.entries[ty] = Entry(pairs, True, True, "lifted-logical")
        return self.entries[ty]

    def contains(self, ty, x: int, y: int) -> bool:
        ty = _ty(ty)
        m_layer, n_layer = self.layers(ty)
        if ty in self._mats or m_layer.size * n_layer.size <= MATRIX_CELLS:
            return bool(self.matrix(ty)[x, y])
        for a, b in self.pairs(ty.arg):
            if not self.contains(ty.res, int(m_layer.tables[x, a]), int(n_layer.tables[y, b])):
                return False
        return True

    def inverse(self) -> "LiftedRelation":
        names = self.provenance["ground_pairs"]
        return LiftedRelation([(b, a) for a, b in names], self.target, self.source, self.budget)

    def materialize(self, types) -> "LiftedRelation":
        """Compute the pairs at ``types``; types over budget get an empty entry."""
        for ty in types:
            try:
                self.entry(ty)
            except BudgetExceeded as exc:
                self.entries[_ty(ty)] = Entry(None, False, False, "lifted-logical", str(exc))
        return self


def lift_logical(ground_pairs, source, target, type_, budget=None) -> LiftedRelation:
    """Logical lifting of ``ground_pairs``, materialized at ``type_`` and its subtypes."""
    rel = LiftedRelation(ground_pairs, source, target, budget)
    for t in subtypes(_ty(type_)):
        rel.entry(t)
    return rel


# term-induced relations ------------------------------------------------------


def term_induced_relation(signature, source, target, type_, generator="auto", budget=None,
                          work_budget: int = DEFAULT_WORK, relation: Optional[Relation] = None) -> Relation:
    """Pairs of denotations of closed terms of ``type_`` in the two families.

    ``generator`` is ``("depth", k)`` for the bounded corpus, ``"saturation"``
    for the exact pair set (order at most two), ``"synthesizer"`` (target S),
    ``"witnesses"`` (definability witnesses of the target, re-interpreted in
    the source), or ``"auto"``.
    """
    sig = get_signature(signature)
    source, target = parse_family(source), parse_family(target)
    ty = _ty(type_)
    budget = budget or default_budget()
    if relation is None:
        relation = Relation(source, target, {"kind": "term-induced", "signature": sig.name, "generator": _gen_name(generator)}, budget=budget)
    for fam in (source, target):
        canonical_constants(fam).require(sig.constants)
    relation.entries[ty] = _induced_entry(sig, source, target, ty, generator, budget, work_budget)
    return relation


def _gen_name(generator):
    if isinstance(generator, tuple):
        return f"{generator[0]}={generator[1]}"
    return str(generator)


def _induced_entry(sig, source, target, ty, generator, budget, work_budget) -> Entry:
    if isinstance(generator, tuple) and generator[0] == "depth":
        return _corpus_entry(sig, source, target, ty, int(generator[1]), budget)
    if generator == "saturation":
        sat = saturate(sig, (source, target), ty, budget, work_budget)
        return Entry(sat.tuples(), True, True, "saturation", f"fixpoint after {sat.passes} passes")
    if generator == "synthesizer":
        return _synth_entry(sig, source, target, ty, budget)
    if generator == "witnesses":
        return _witness_entry(sig, source, target, ty, budget, work_budget)
    if generator != "auto":
        raise ValueError(f"unknown generator {generator!r}")
    notes = []
    if ty.order <= 2:
        try:
            exact = _induced_entry(sig, source, target, ty, "saturation", budget, work_budget)
        except BudgetExceeded as exc:
            notes.append(f"exact saturation skipped: {exc}")
        else:
            if target is Family.S:
                synth = _synth_entry(sig, source, target, ty, budget)
                known = {tuple(p) for p in exact.pairs.tolist()}
                stray = [p for p in synth.pairs.tolist() if tuple(p) not in known]
                if stray:
                    raise AssertionError(f"synthesized pair {stray[0]} missing from the exact relation at {ty}")
                exact.method = "saturation+synthesizer"
            return exact
    try:
        if target is Family.S:
            e = _synth_entry(sig, source, target, ty, budget)
        else:
            e = _witness_entry(sig, source, target, ty, budget, work_budget)
    except BudgetExceeded as exc:
        notes.append(str(exc))
        return _definability_entry(sig, target, ty, budget, work_budget, notes)
    e.note = "; ".join(notes + ([e.note] if e.note else []))
    return e


def _definability_entry(sig, target, ty, budget, work_budget, notes) -> Entry:
    # a target is hit by a term-induced relation exactly when it is definable
    try:
        if ty.order > 2:
            raise BudgetExceeded("exact saturation", 2, f"{ty} has order {ty.order}")
        sat = saturate(sig, target, ty, budget, work_budget)
    except BudgetExceeded as exc:
        notes.append(str(exc))
        return Entry(None, False, False, "none", "; ".join(notes))
    notes.append("source denotations not materialized; hit targets are the definable targets")
    return Entry(None, False, True, "target-definability", "; ".join(notes), targets=np.unique(sat.indices(0)))


def _corpus_entry(sig, source, target, ty, depth, budget) -> Entry:
    pairs = set()
    for t in enumerate_closed_terms(sig, ty, depth) if depth > 0 else []:
        pairs.add((interpret(t, source, budget=budget).index, interpret(t, target, budget=budget).index))
    return Entry(_sorted_pairs(sorted(pairs)), False, False, "enumeration", f"closed terms of depth <= {depth}")


def _synth_entry(sig, source, target, ty, budget) -> Entry:
    from .definability import synthesize_S

    if target is not Family.S or not {"true", "false", "if"} <= set(sig.constants):
        raise ValueError("the synthesizer needs target S and the lambdaS constants")
    layer = build_layer(Family.S, ty, budget)
    pairs = []
    for i in range(layer.size):
        res = synthesize_S(layer.element(i), budget)
        pairs.append((interpret(res.term, source, budget=budget).index, i))
    return Entry(_sorted_pairs(pairs), False, True, "synthesizer", "every target synthesized")


def _witness_entry(sig, source, target, ty, budget, work_budget) -> Entry:
    sat = saturate(sig, target, ty, budget, work_budget)
    idx = sat.indices(0)
    seen = {}
    for row, i in enumerate(idx.tolist()):
        seen.setdefault(i, row)
    pairs = [(interpret(sat.witness(r), source, budget=budget).index, i) for i, r in sorted(seen.items())]
    return Entry(_sorted_pairs(pairs), False, True, "witnesses", "target definables re-interpreted in the source")


# checks ------------------------------------------------------------------------


def partial_function_counterexample(pairs: np.ndarray) -> Optional[tuple]:
    """``(x, y, y')`` with ``y != y'`` both related to ``x``, or ``None``."""
    if len(pairs) == 0:
        return None
    p = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    clash = np.nonzero((p[1:, 0] == p[:-1, 0]) & (p[1:, 1] != p[:-1, 1]))[0]
    if len(clash) == 0:
        return None
    k = int(clash[0])
    return int(p[k, 0]), int(p[k, 1]), int(p[k + 1, 1])


@dataclass
class PartialFunctionVerdict:
    verdict: Verdict
    counterexample: Optional[tuple] = None
    method: str = "direct"

    def to_dict(self, relation=None, ty=None):
        cex = None
        if self.counterexample is not None and relation is not None:
            x, y, y2 = self.counterexample
            sl, tl = build_layer(relation.source, ty), build_layer(relation.target, ty)
            cex = {"x": sl.literal(x), "y": tl.literal(y), "y_prime": tl.literal(y2)}
        return {"verdict": self.verdict.value, "method": self.method, "counterexample": cex}


@dataclass
class SurjectivityVerdict:
    verdict: Verdict
    hit: int = 0
    total: int = 0
    unhit: list = field(default_factory=list)
    method: str = ""

    def to_dict(self, relation=None, ty=None, limit: int = 16):
        unhit = self.unhit
        if relation is not None and unhit:
            tl = build_layer(relation.target, ty)
            unhit = [tl.literal(i) for i in unhit[:limit]]
        return {
            "verdict": self.verdict.value,
            "hit": self.hit,
            "total": self.total,
            "unhit": unhit,
            "unhit_count": len(self.unhit),
            "method": self.method,
        }


def check_partial_function(relation: Relation, types=None) -> dict:
    out = {}
    for ty in [_ty(t) for t in (types or relation.types())]:
        try:
            e = relation.entry(ty)
        except BudgetExceeded:
            out[ty] = PartialFunctionVerdict(Verdict.UNDECIDED, method="direct")
            continue
        if e.pairs is None:
            out[ty] = PartialFunctionVerdict(Verdict.UNDECIDED, method="direct")
            continue
        cex = partial_function_counterexample(e.pairs)
        if cex is not None:
            out[ty] = PartialFunctionVerdict(Verdict.NO, cex)
        else:
            out[ty] = PartialFunctionVerdict(Verdict.YES if e.exact else Verdict.UNDECIDED)
    return out


def check_surjective(relation: Relation, types=None) -> dict:
    out = {}
    for ty in [_ty(t) for t in (types or relation.types())]:
        try:
            total = build_layer(relation.target, ty, relation.budget).size
            e = relation.entry(ty)
        except BudgetExceeded as exc:
            out[ty] = SurjectivityVerdict(Verdict.UNDECIDED, method=str(exc))
            continue
        hit = e.hit()
        if hit is None:
            out[ty] = SurjectivityVerdict(Verdict.UNDECIDED, total=total, method=e.note)
            continue
        unhit = sorted(set(range(total)) - set(hit.tolist()))
        if not unhit:
            v = Verdict.YES
        elif e.exact or e.targets_exact:
            v = Verdict.NO
        else:
            v = Verdict.UNDECIDED
        out[ty] = SurjectivityVerdict(v, len(hit), total, unhit, e.method)
    return out


def compose(first: Relation, second: Relation) -> Relation:
    """Relational composition, type by type: ``x R z`` iff ``x first y second z``."""
    if first.target is not second.source:
        raise FamilyMismatch(
            f"cannot compose {first.source.value}->{first.target.value} with {second.source.value}->{second.target.value}"
        )
    prov = {"kind": "composed", "first": first.provenance, "second": second.provenance}
    rel = Relation(first.source, second.target, prov, budget=min(first.budget, second.budget))
    types = [t for t in first.types() if t in second.types()] or []
    for ty in types:
        rel.entries[ty] = _compose_entry(first, second, ty)
    return rel


def _compose_entry(first, second, ty) -> Entry:
    try:
        a, b = first.entry(ty), second.entry(ty)
    except BudgetExceeded as exc:
        return Entry(None, False, False, "composed", str(exc))
    if b.pairs is not None and a.pairs is None and a.targets is not None:
        targets = np.unique(b.pairs[np.isin(b.pairs[:, 0], a.targets), 1])
        return Entry(None, False, a.targets_exact and b.exact, "composed", a.note, targets=targets)
    if a.pairs is None or b.pairs is None:
        return Entry(None, False, False, "composed", a.note or b.note)
    mid_targets = {}
    for y, z in b.pairs.tolist():
        mid_targets.setdefault(y, []).append(z)
    pairs = [(x, z) for x, y in a.pairs.tolist() for z in mid_targets.get(y, ())]
    exact = a.exact and b.exact
    return Entry(_sorted_pairs(pairs), exact, exact, "composed")


def compose_chain(relations) -> Relation:
    out = relations[0]
    for r in relations[1:]:
        out = compose(out, r)
    return out


# certificates --------------------------------------------------------------------


@dataclass
class TypeVerdict:
    type: SimpleType
    pairs: Optional[int]
    exact: bool
    method: str
    partial_function: PartialFunctionVerdict
    surjective: SurjectivityVerdict
    note: str = ""


@dataclass
class CollapseCertificate:
    source: Family
    target: Family
    relation: Relation
    per_type: list
    budget: int
    work_budget: int
    assumptions: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [
            str(v.type)
            for v in self.per_type
            if v.partial_function.verdict is Verdict.NO or v.surjective.verdict is Verdict.NO
        ]

    @property
    def undecided(self) -> list:
        return [
            str(v.type)
            for v in self.per_type
            if Verdict.UNDECIDED in (v.partial_function.verdict, v.surjective.verdict)
        ]

    @property
    def certified(self) -> bool:
        return bool(self.per_type) and not self.failures

    def verdict(self, ty) -> TypeVerdict:
        ty = _ty(ty)
        for v in self.per_type:
            if v.type == ty:
                return v
        raise KeyError(ty)

    def to_dict(self):
        return {
            "schema": 1,
            "kind": "collapse",
            "source": self.source.value,
            "target": self.target.value,
            "certified": self.certified,
            "undecided": self.undecided,
            "failures": self.failures,
            "provenance": self.relation.provenance,
            "budgets": {"layer": self.budget, "saturation_work": self.work_budget},
            "assumptions": self.assumptions,
            "types": [
                {
                    "type": str(v.type),
                    "pairs": v.pairs,
                    "exact": v.exact,
                    "method": v.method,
                    "note": v.note,
                    "partial_function": v.partial_function.to_dict(self.relation, v.type),
                    "surjective": v.surjective.to_dict(self.relation, v.type),
                }
                for v in self.per_type
            ],
        }


def certify_collapse(source, target, relation: Relation, types=None, work_budget: int = DEFAULT_WORK) -> CollapseCertificate:
    """Check partial-function and surjectivity at every type of the cap.

    Where the relation is not known exactly at a type, its partial-function
    verdict comes from the lemma: a pre-logical relation that is a partial
    function at bool and surjective at all types is a pre-logical surjection.
    """
    source, target = parse_family(source), parse_family(target)
    if relation.source is not source or relation.target is not target:
        raise FamilyMismatch("relation does not go from source to target")
    types = [_ty(t) for t in (types or types_up_to())]
    pf = check_partial_function(relation, types)
    sj = check_surjective(relation, types)
    assumptions = []
    ground_ok = BOOL in pf and pf[BOOL].verdict is Verdict.YES
    all_surj = all(sj[t].verdict is Verdict.YES for t in types)
    for t in types:
        if pf[t].verdict is Verdict.UNDECIDED and ground_ok and sj[t].verdict is Verdict.YES:
            pf[t] = PartialFunctionVerdict(Verdict.YES if all_surj else Verdict.UNDECIDED, method="lemma")
    if any(v.method == "lemma" for v in pf.values()):
        assumptions.append(
            "partial function at higher types follows from the ground check, surjectivity at every checked type "
            "and pre-logicality by construction; surjectivity beyond the type cap is assumed"
        )
    kind = relation.provenance.get("kind")
    if kind == "term-induced" or "term-induced" in str(relation.provenance):
        assumptions.append("term-induced relations are pre-logical by construction")
    per_type = []
    for t in types:
        try:
            e = relation.entry(t)
            n, exact, method, note = (None if e.pairs is None else len(e.pairs)), e.exact, e.method, e.note
        except BudgetExceeded as exc:
            n, exact, method, note = None, False, "none", str(exc)
        per_type.append(TypeVerdict(t, n, exact, method, pf[t], sj[t], note))
    return CollapseCertificate(source, target, relation, per_type, relation.budget, work_budget, assumptions)


@dataclass
class IsoTypeVerdict:
    type: SimpleType
    bijection: bool
    order_reversing: Optional[bool]
    sizes: tuple
    detail: str = ""


@dataclass
class IsoCertificate:
    left: Family
    right: Family
    ground_pairs: list
    per_type: list
    budget: int

    @property
    def certified(self) -> bool:
        return bool(self.per_type) and all(v.bijection and v.order_reversing for v in self.per_type)

    def to_dict(self):
        return {
            "schema": 1,
            "kind": "isomorphism",
            "left": self.left.value,
            "right": self.right.value,
            "ground_pairs": self.ground_pairs,
            "certified": self.certified,
            "budgets": {"layer": self.budget},
            "types": [
                {
                    "type": str(v.type),
                    "bijection": v.bijection,
                    "order_reversing": v.order_reversing,
                    "sizes": list(v.sizes),
                    "detail": v.detail,
                }
                for v in self.per_type
            ],
        }


def certify_iso(ground_pairs, left, right, types=None, budget=None) -> IsoCertificate:
    """Check that the lifted relation is an order-reversing bijection at each type."""
    rel = LiftedRelation(ground_pairs, left, right, budget)
    out = []
    for ty in [_ty(t) for t in (types or types_up_to())]:
        lm, rn = rel.layers(ty)
        pairs = rel.pairs(ty)
        xs, ys = pairs[:, 0], pairs[:, 1]
        bij = (
            len(pairs) == lm.size == rn.size
            and len(np.unique(xs)) == lm.size
            and len(np.unique(ys)) == rn.size
        )
        if not bij:
            detail = f"{len(pairs)} pairs between {lm.size} and {rn.size} elements"
            out.append(IsoTypeVerdict(ty, False, None, (lm.size, rn.size), detail))
            continue
        phi = np.empty(lm.size, dtype=np.int64)
        phi[xs] = ys
        left_m = lm.poset.submatrix(range(lm.size))
        right_m = rn.poset.submatrix(phi)
        # x <= x'  iff  phi(x') <= phi(x)
        rev = bool((left_m == right_m.T).all())
        out.append(IsoTypeVerdict(ty, True, rev, (lm.size, rn.size)))
    return IsoCertificate(rel.source, rel.target, rel.provenance["ground_pairs"], out, rel.budget)


# fundamental property ---------------------------------------------------------------


@dataclass
class FundamentalReport:
    signature: str
    source: Family
    target: Family
    depth: int
    terms_checked: int
    violations: list
    constant_pairs: dict
    ground_constants_distinct: bool

    @property
    def passed(self) -> bool:
        return not self.violations and all(self.constant_pairs.values())

    def to_dict(self):
        return {
            "schema": 1,
            "kind": "fundamental-property",
            "signature": self.signature,
            "source": self.source.value,
            "target": self.target.value,
            "depth": self.depth,
            "terms_checked": self.terms_checked,
            "passed": self.passed,
            "constant_pairs_related": self.constant_pairs,
            "ground_constants_distinct": self.ground_constants_distinct,
            "violations": self.violations,
        }


def check_fundamental_property(relation: Relation, signature, depth: int = 5, types=None,
                               strict: bool = True, budget=None) -> FundamentalReport:
    """Check that every closed term up to ``depth`` has a related denotation pair."""
    sig = get_signature(signature)
    src, tgt = relation.source, relation.target
    for fam in (src, tgt):
        canonical_constants(fam).require(sig.constants)
    const_ok = {}
    for name, ty in sig.constants.items():
        c = Const(name, ty)
        x = interpret(c, src, budget=budget).index
        y = interpret(c, tgt, budget=budget).index
        const_ok[name] = relation.contains(ty, x, y)
    offending = sorted(n for n, ok in const_ok.items() if not ok)
    if offending and strict:
        raise PreconditionFailed(offending, "constant denotations are not related: " + ", ".join(offending))
    ground = [n for n, t in sig.constants.items() if t == BOOL]
    distinct = all(
        len({interpret(Const(n, BOOL), f).index for n in ground}) == len(ground) for f in (src, tgt)
    )
    types = [_ty(t) for t in (types or relation.types())]
    checked = 0
    violations = []
    for ty in types:
        for term in enumerate_closed_terms(sig, ty, depth):
            checked += 1
            x = interpret(term, src, budget=budget)
            y = interpret(term, tgt, budget=budget)
            if not relation.contains(ty, x.index, y.index):
                violations.append({"type": str(ty), "term": pretty(term), "source": x.literal(), "target": y.literal()})
    return FundamentalReport(sig.name, src, tgt, depth, checked, violations, const_ok, distinct)


# the collapse situations of the frames --------------------------------------------

COLLAPSE_ARROWS = (("C", "S"), ("E", "S"), ("C", "E"), ("E", "C"), ("L", "C"), ("L", "E"))


_frame_relations: dict = {}


def frame_relation(source, target, types=None, budget=None, work_budget: int = DEFAULT_WORK) -> Relation:
    """The relation witnessing ``source -> target`` among the four frames (memoized)."""
    source, target = parse_family(source), parse_family(target)
    types = tuple(_ty(t) for t in (types or types_up_to()))
    key = (source, target, types, budget or default_budget(), work_budget)
    if key not in _frame_relations:
        _frame_relations[key] = _frame_relation(source, target, list(types), budget, work_budget)
    return _frame_relations[key]


def _frame_relation(source, target, types, budget, work_budget) -> Relation:
    key = (source, target)
    S, C, E, L = Family.S, Family.C, Family.E, Family.L
    if key in ((C, S), (E, S)):
        return _induced_over("lambdaS", source, target, types, budget, work_budget)
    if key == (C, E):
        return LiftedRelation(E_BOOL, C, E, budget).materialize(types)
    if key == (E, C):
        return LiftedRelation(E_BOOL, C, E, budget).inverse().materialize(types)
    if key == (L, C):
        return _induced_over("lambdaC", L, C, types, budget, work_budget)
    if source is target:
        return _identity(source, types, budget)
    if source is L or target is S:
        first = frame_relation(L, C, types, budget, work_budget) if source is L else frame_relation(source, C, types, budget, work_budget)
        second = frame_relation(C, target, types, budget, work_budget)
        return compose(first, second)
    raise ValueError(f"no collapse situation {source.value} -> {target.value} among the frames")


def _induced_over(sig, source, target, types, budget, work_budget):
    rel = None
    for ty in types:
        rel = term_induced_relation(sig, source, target, ty, "auto", budget, work_budget, rel)
    rel.provenance["types"] = [str(t) for t in types]
    return rel


def _identity(fam, types, budget):
    rel = Relation(fam, fam, {"kind": "identity"}, budget=budget)
    for ty in types:
        try:
            n = build_layer(fam, ty, budget).size
            rel.entries[ty] = Entry(np.stack([np.arange(n)] * 2, axis=1), True, True, "identity")
        except BudgetExceeded as exc:
            rel.entries[ty] = Entry(None, False, False, "identity", str(exc))
    return rel


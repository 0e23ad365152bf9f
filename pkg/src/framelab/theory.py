"""Equational theories of frames over bounded term corpora."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .calculus.enumeration import enumerate_closed_terms
from .calculus.signatures import get_signature
from .calculus.terms import Term, pretty, size
from .errors import BudgetExceeded, ModelConditionFailed, TheoryViolation
from .frames import Family, build_layer, parse_family
from .semantics import Interpreter, canonical_constants, validate_delta_soundness
from .simpletypes import Arrow, parse_type

MAX_LISTED = 25


def _key(interp, value, ty):
    """Element index, or the graph over the argument layer when the layer at
    ``ty`` is over budget (two values are equal iff their graphs are)."""
    try:
        return interp.materialize(value, ty)
    except BudgetExceeded:
        if not isinstance(ty, Arrow):
            raise
        arg = interp.layer(ty.arg)
        return tuple(_key(interp, interp.apply(value, d, ty), ty.res) for d in range(arg.size))


def denotation(term: Term, family, budget=None):
    """Hashable denotation of a closed term, comparable within one type."""
    interp = Interpreter(family, budget=budget)
    return _key(interp, interp.eval(term, {}), term.type)


def _show(family, ty, key):
    if isinstance(key, tuple):
        arg = build_layer(family, ty.arg)
        return {arg.text(d): _show(family, ty.res, k) for d, k in enumerate(key)}
    return build_layer(family, ty).text(key)


@dataclass
class TheoryReport:
    signature: str
    source: Family
    target: Family
    depth: int
    types: list
    terms: dict
    violations: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)

    @property
    def inclusion_holds(self) -> bool:
        return not self.violations

    @property
    def strict(self) -> bool:
        return bool(self.witnesses)

    def to_dict(self):
        return {
            "schema": 1,
            "kind": "theory-comparison",
            "signature": self.signature,
            "source": self.source.value,
            "target": self.target.value,
            "corpus": {"depth": self.depth, "types": [str(t) for t in self.types], "terms": {str(k): v for k, v in self.terms.items()}},
            "inclusion_holds_on_corpus": self.inclusion_holds,
            "violations": [w.to_dict() for w in self.violations[:MAX_LISTED]],
            "violation_count": len(self.violations),
            "strictness_witnesses": [w.to_dict() for w in self.witnesses[:MAX_LISTED]],
            "strictness_witness_count": len(self.witnesses),
        }


@dataclass
class SeparatingPair:
    """Two closed terms equal in ``equal_in`` and distinct in ``distinct_in``."""

    left: Term
    right: Term
    equal_in: Family
    distinct_in: Family

    def verify(self) -> bool:
        a = denotation(self.left, self.equal_in) == denotation(self.right, self.equal_in)
        b = denotation(self.left, self.distinct_in) != denotation(self.right, self.distinct_in)
        return a and b

    def to_dict(self):
        ty = self.left.type
        la = denotation(self.left, self.equal_in)
        ld, rd = denotation(self.left, self.distinct_in), denotation(self.right, self.distinct_in)
        return {
            "type": str(ty),
            "left": pretty(self.left),
            "right": pretty(self.right),
            "equal_in": {"family": self.equal_in.value, "value": _show(self.equal_in, ty, la)},
            "distinct_in": {
                "family": self.distinct_in.value,
                "left": _show(self.distinct_in, ty, ld),
                "right": _show(self.distinct_in, ty, rd),
            },
        }


def _require_models(sig, families):
    for fam in families:
        canonical_constants(fam).require(sig.constants)
        report = validate_delta_soundness(sig, fam)
        if not report.passed:
            raise ModelConditionFailed(f"{fam.value} is not a model of {sig.name}")


def _corpus(sig, ty, depth, fams):
    """Per term: its denotation index in each family (shortest terms first)."""
    out = []
    for t in enumerate_closed_terms(sig, ty, depth):
        out.append((t, tuple(denotation(t, f) for f in fams)))
    return out


def _separations(corpus, eq_pos, ne_pos, equal_in, distinct_in):
    """Pairs equal at ``eq_pos`` but distinct at ``ne_pos``: for every class of
    the first family, the smallest representative of each distinct value in
    the second, paired with the class's overall smallest term."""
    classes: dict = {}
    for t, den in corpus:
        classes.setdefault(den[eq_pos], {}).setdefault(den[ne_pos], []).append(t)
    out = []
    for key in sorted(classes, key=repr):
        by_value = classes[key]
        if len(by_value) < 2:
            continue
        reps = sorted((min(ts, key=lambda u: (size(u), pretty(u))) for ts in by_value.values()), key=lambda u: (size(u), pretty(u)))
        for other in reps[1:]:
            pair = SeparatingPair(reps[0], other, equal_in, distinct_in)
            if not pair.verify():
                raise TheoryViolation(f"separating pair failed re-verification: {pretty(reps[0])} / {pretty(other)}")
            out.append(pair)
    return out


def compare_theories(signature, source, target, depth: int = 5, types=("bool -> bool",), check_models: bool = True) -> TheoryReport:
    """Check Th(source) within Th(target) on the closed terms up to ``depth``."""
    sig = get_signature(signature)
    source, target = parse_family(source), parse_family(target)
    types = [parse_type(t) if isinstance(t, str) else t for t in types]
    if check_models:
        _require_models(sig, {source, target})
    report = TheoryReport(sig.name, source, target, depth, types, {})
    for ty in types:
        corpus = _corpus(sig, ty, depth, (source, target))
        report.terms[ty] = len(corpus)
        report.violations += _separations(corpus, 0, 1, source, target)
        report.witnesses += _separations(corpus, 1, 0, target, source)
    return report


def find_separating_pair(signature, family_a, family_b, depth: int, type_) -> Optional[tuple]:
    """Some enumerated pair equal in ``family_a`` and distinct in ``family_b``."""
    sig = get_signature(signature)
    a, b = parse_family(family_a), parse_family(family_b)
    ty = parse_type(type_) if isinstance(type_, str) else type_
    seen: dict = {}
    for t in enumerate_closed_terms(sig, ty, depth):
        da, db = denotation(t, a), denotation(t, b)
        for u, du in seen.get(da, ()):
            if du != db:
                pair = SeparatingPair(u, t, a, b)
                if not pair.verify():
                    raise TheoryViolation("separating pair failed re-verification")
                return u, t
        seen.setdefault(da, []).append((t, db))
    return None

"""Definability: the constructive synthesizer for the set-theoretic frame,
saturation of definable elements, totality classes and a small macro library."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .calculus.enumeration import enumerate_closed_terms
from .calculus.parser import parse_term
from .calculus.signatures import FALSE, IF, TRUE, get_signature
from .calculus.terms import App, Lam, Term, Var, apps, pretty
from .closure import Saturation, saturate
from .errors import BudgetExceeded, SynthesisError, TypeMismatch
from .frames import Element, Family, build_layer, default_budget, parse_family
from .order import LatticeReport, is_lattice
from .semantics import Interpreter, interpret
from .simpletypes import BOOL, Arrow, SimpleType, arrow, parse_type, subtypes, uncurry


@dataclass(frozen=True)
class SynthesisResult:
    target: Element
    term: Term
    verified: bool

    def to_dict(self):
        return {
            "type": str(self.target.type),
            "target": self.target.literal(),
            "term": pretty(self.term),
            "verified": self.verified,
        }


class _Synth:
    """Memoized DEF/EQ construction for the set-theoretic frame."""

    def __init__(self, budget=None):
        self.budget = budget
        self.defs: dict = {}
        self.eqs: dict = {}

    def layer(self, ty):
        return build_layer(Family.S, ty, self.budget)

    def eq(self, ty: SimpleType) -> Term:
        if ty in self.eqs:
            return self.eqs[ty]
        if ty == BOOL:
            x, y = Var("x", BOOL), Var("y", BOOL)
            body = apps(IF, x, apps(IF, y, TRUE, FALSE), apps(IF, y, FALSE, TRUE))
            term = Lam("x", BOOL, Lam("y", BOOL, body))
        else:
            f, g = Var("f", ty), Var("g", ty)
            inner = self.eq(ty.res)
            tests = [
                apps(inner, App(f, self.define(ty.arg, a)), App(g, self.define(ty.arg, a)))
                for a in range(self.layer(ty.arg).size)
            ]
            body = tests[-1]
            for t in reversed(tests[:-1]):
                body = apps(IF, t, body, FALSE)
            term = Lam("f", ty, Lam("g", ty, body))
        self.eqs[ty] = term
        return term

    def define(self, ty: SimpleType, index: int) -> Term:
        key = (ty, index)
        if key in self.defs:
            return self.defs[key]
        layer = self.layer(ty)
        if ty == BOOL:
            term = TRUE if layer.family.values[index] == 1 else FALSE
        else:
            dom = self.layer(ty.arg)
            res_args, _ = uncurry(ty.res)
            ys = [Var(f"y{i + 1}", t) for i, t in enumerate(res_args)]
            x = Var("x", ty.arg)
            outs = [int(v) for v in layer.tables[index]]
            branches = [apps(self.define(ty.res, v), *ys) for v in outs]
            if len(set(outs)) == 1:
                body = branches[0]
            else:
                body = branches[-1]
                for a in range(dom.size - 2, -1, -1):
                    test = apps(self.eq(ty.arg), x, self.define(ty.arg, a))
                    body = apps(IF, test, branches[a], body)
            for y in reversed(ys):
                body = Lam(y.name, y.type, body)
            term = Lam("x", ty.arg, body)
        self.defs[key] = term
        return term


_synth_cache: dict = {}


def _synth(budget) -> _Synth:
    key = budget or default_budget()
    if key not in _synth_cache:
        _synth_cache[key] = _Synth(key)
    return _synth_cache[key]


def synthesize_S(target: Element, budget=None) -> SynthesisResult:
    """A closed lambdaS term denoting ``target`` in S, verified by interpretation."""
    if target.family is not Family.S:
        raise TypeMismatch(f"the synthesizer targets S elements, got a {target.family.value} element")
    term = _synth(budget).define(target.type, target.index)
    got = interpret(term, Family.S, budget=budget)
    if got != target:
        raise SynthesisError(f"synthesized term denotes {got} instead of {target}")
    return SynthesisResult(target, term, True)


def synthesize_eq_S(sigma, budget=None) -> Term:
    """The equality predicate on S at ``sigma`` as a closed lambdaS term, checked exhaustively."""
    if isinstance(sigma, str):
        sigma = parse_type(sigma)
    term = _synth(budget).eq(sigma)
    layer = build_layer(Family.S, sigma, budget)
    interp = Interpreter(Family.S, budget=budget)
    eq = interp.eval(term, {})
    ty = term.type
    for a in range(layer.size):
        partial = interp.apply(eq, a, ty)
        for b in range(layer.size):
            got = interp.materialize(interp.apply(partial, b, ty.res), BOOL)
            if got != (0 if a == b else 1):  # S codes: tt=0, ff=1
                raise SynthesisError(f"equality term is wrong at {sigma} on ({a}, {b})")
    return term


# saturation -------------------------------------------------------------------


@dataclass
class DefinableSet:
    signature: str
    family: Family
    type: SimpleType
    elements: list
    witnesses: dict
    layer_size: int
    exact: bool
    passes: Optional[int] = None
    depth: Optional[int] = None

    @property
    def complete(self) -> bool:
        return len(self.elements) == self.layer_size

    def to_dict(self):
        layer = build_layer(self.family, self.type)
        return {
            "signature": self.signature,
            "family": self.family.value,
            "type": str(self.type),
            "definable": len(self.elements),
            "layer_size": self.layer_size,
            "exact_fixpoint": self.exact,
            "passes": self.passes,
            "depth": self.depth,
            "witnesses": {layer.text(i): pretty(t) for i, t in sorted(self.witnesses.items())},
        }


def saturate_definables(signature, family, type_, depth: int = 3, budget=None, verify: bool = True) -> dict:
    """Definable elements with witnesses at ``type_`` and each of its subtypes.

    Types of order at most two are saturated to an exact fixpoint; ``depth``
    bounds the term corpus used at higher orders, where results are lower
    bounds only.
    """
    sig = get_signature(signature)
    family = parse_family(family)
    if isinstance(type_, str):
        type_ = parse_type(type_)
    out = {}
    for ty in subtypes(type_):
        out[ty] = _definable_at(sig, family, ty, depth, budget, verify)
    return out


def _definable_at(sig, family, ty, depth, budget, verify) -> DefinableSet:
    layer = build_layer(family, ty, budget)
    if ty.order <= 2:
        sat = saturate(sig, family, ty, budget)
        if verify:
            sat.verify()
        idx = sat.indices(0)
        wit = {}
        for row, i in enumerate(idx.tolist()):
            wit.setdefault(i, row)
        witnesses = {i: sat.witness(r) for i, r in wit.items()}
        return DefinableSet(sig.name, family, ty, sorted(wit), witnesses, layer.size, True, sat.passes)
    witnesses = {}
    for t in enumerate_closed_terms(sig, ty, depth):
        e = interpret(t, family, signature=sig, budget=budget)
        witnesses.setdefault(e.index, t)
    return DefinableSet(sig.name, family, ty, sorted(witnesses), witnesses, layer.size, False, depth=depth)


# totality ------------------------------------------------------------------------

TOTAL_PAIRS = ((1, 1), (2, 2))  # (tt, tt), (ff, ff) as ground values


@dataclass
class TotalityClass:
    base: Element
    fiber: list
    lattice: LatticeReport
    information: LatticeReport

    def to_dict(self):
        layer = build_layer(Family.C, self.base.type)
        lit = lambda i: None if i is None else layer.text(i)
        return {
            "base": self.base.layer.text(self.base.index),
            "size": len(self.fiber),
            "fiber": [layer.text(i) for i in self.fiber],
            "is_lattice": self.lattice.is_lattice,
            "bottom": lit(self.lattice.bottom),
            "top": lit(self.lattice.top),
            "information_order": {"bottom": lit(self.information.bottom), "top": lit(self.information.top)},
        }


@dataclass
class TotalityReport:
    type: SimpleType
    classes: list
    residue: list
    partial_function: bool

    def class_of(self, base: Element) -> TotalityClass:
        for c in self.classes:
            if c.base == base:
                return c
        raise KeyError(base)

    def to_dict(self):
        layer = build_layer(Family.C, self.type)
        return {
            "type": str(self.type),
            "partial_function": self.partial_function,
            "classes": [c.to_dict() for c in self.classes],
            "non_total": [layer.text(i) for i in self.residue],
            "order": "eagerness (dual of the pointwise information order)",
        }


def totality_classes(sigma, budget=None) -> TotalityReport:
    """Fibers of the lifted totality relation from C to S at ``sigma``.

    Lattice bottoms and tops are reported in the eagerness order, in which
    the laziest implementation is least; the information-order extremes are
    included as well.
    """
    from .relations import lift_logical, partial_function_counterexample

    if isinstance(sigma, str):
        sigma = parse_type(sigma)
    rel = lift_logical(TOTAL_PAIRS, Family.C, Family.S, sigma, budget)
    pairs = rel.pairs(sigma)
    cex = partial_function_counterexample(pairs)
    if cex is not None:
        raise TypeMismatch(f"totality relation is not a partial function at {sigma}: {cex}")
    c_layer = build_layer(Family.C, sigma, budget)
    s_layer = build_layer(Family.S, sigma, budget)
    classes = []
    for base in np.unique(pairs[:, 1]):
        fiber = sorted(pairs[pairs[:, 1] == base, 0].tolist())
        info = is_lattice(fiber, c_layer.poset)
        eager = is_lattice(fiber, c_layer.poset.dual())
        classes.append(TotalityClass(s_layer.element(int(base)), fiber, eager, info))
    residue = sorted(set(range(c_layer.size)) - set(pairs[:, 0].tolist()))
    return TotalityReport(sigma, classes, residue, True)


def totality_class(base: Element, budget=None, lattice: bool = True) -> TotalityClass:
    """The C implementations of one S element."""
    from .relations import lift_logical

    if base.family is not Family.S:
        raise TypeMismatch("totality classes are indexed by S elements")
    sigma = base.type
    rel = lift_logical(TOTAL_PAIRS, Family.C, Family.S, sigma, budget)
    fiber = sorted(np.nonzero(rel.matrix(sigma)[:, base.index])[0].tolist())
    poset = build_layer(Family.C, sigma, budget).poset
    if lattice:
        return TotalityClass(base, fiber, is_lattice(fiber, poset.dual()), is_lattice(fiber, poset))
    none = LatticeReport(False, failure=("not checked",))
    return TotalityClass(base, fiber, none, none)


def or_type(n: int) -> SimpleType:
    return arrow(*([BOOL] * (n + 1)))


def or_class_size(n: int, budget=None) -> int:
    """Number of C implementations of n-ary disjunction."""
    ty = or_type(n)
    s_layer = build_layer(Family.S, ty, budget)
    import itertools

    table = []
    for args in itertools.product((0, 1), repeat=n):  # S codes: tt=0, ff=1
        table.append(0 if 0 in args else 1)
    target = _s_index_of_uncurried(s_layer, table, n)
    return len(totality_class(s_layer.element(target), budget, lattice=False).fiber)


def _s_index_of_uncurried(layer, flat, n):
    if n == 0:
        return flat[0]
    half = len(flat) // 2
    inner = [_s_index_of_uncurried(layer.res, flat[:half], n - 1), _s_index_of_uncurried(layer.res, flat[half:], n - 1)]
    return layer.index_of(inner)


# macros -----------------------------------------------------------------------

MACROS = {
    "not": ("lambdaS", r"\x:bool. if x false true"),
    "pand": ("lambdaC", r"\x:bool y:bool. if (por (if x false true) (if y false true)) false true"),
    "pif": (
        "lambdaC",
        r"\c:bool x:bool y:bool. por (if (por (if c false true) (if x false true)) false true)"
        r" (por (if (por c (if y false true)) false true)"
        r" (if (por (if x false true) (if y false true)) false true))",
    ),
}


def _expected_macro(name):
    """Expected C tables, as functions of ground values (None for bottom)."""
    def pand(a, b):
        if a is False or b is False:
            return False
        if a is True and b is True:
            return True
        return None

    def por(a, b):
        if a is True or b is True:
            return True
        if a is False and b is False:
            return False
        return None

    def pif(c, x, y):
        if c is None:
            return x if x == y else None
        return x if c else y

    return {"not": lambda a: None if a is None else not a, "pand": pand, "pif": pif}[name]


def macro(name: str) -> Term:
    sig, text = MACROS[name]
    return parse_term(text, sig)


def verify_macro(name: str) -> bool:
    """Check a macro's C denotation against its intended table."""
    import itertools

    term = macro(name)
    elem = interpret(term, Family.C)
    expect = _expected_macro(name)
    args_n = len(uncurry(term.type)[0])
    to_py = {0: None, 1: True, 2: False}
    for args in itertools.product(range(3), repeat=args_n):
        e = elem
        for a in args:
            e = Element(e.layer.res, int(e.layer.tables[e.index, a]))
        if to_py[e.index] != expect(*[to_py[a] for a in args]):
            return False
    return True

"""Leftmost-outermost beta/delta rewriting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import FuelExhausted
from .signatures import Signature, get_signature
from .terms import App, Const, Lam, Meta, Term, alpha_equal, instantiate, spine, substitute


@dataclass(frozen=True)
class Reduction:
    term: Term
    steps: int


def match_rule(term: Term, rule) -> Optional[dict]:
    head, args = spine(term)
    rhead, rargs = spine(rule.lhs)
    if not isinstance(head, Const) or head.name != rhead.name or len(args) != len(rargs):
        return None
    binding = {}
    for pat, actual in zip(rargs, args):
        if isinstance(pat, Meta):
            binding[pat.name] = actual
        elif not (isinstance(actual, Const) and actual.name == pat.name):
            return None
    return binding


def contract(term: Term, signature: Signature) -> Optional[Term]:
    """Contract ``term`` itself if it is a redex (beta first, then rules in order)."""
    if isinstance(term, App) and isinstance(term.fn, Lam):
        return substitute(term.fn.body, term.fn.var, term.arg)
    for rule in signature.rules:
        b = match_rule(term, rule)
        if b is not None:
            return instantiate(rule.rhs, b)
    return None


def step(term: Term, signature) -> Optional[Term]:
    """One leftmost-outermost step, or ``None`` for a normal form."""
    sig = get_signature(signature)
    out = contract(term, sig)
    if out is not None:
        return out
    if isinstance(term, App):
        s = step(term.fn, sig)
        if s is not None:
            return App(s, term.arg)
        s = step(term.arg, sig)
        if s is not None:
            return App(term.fn, s)
    elif isinstance(term, Lam):
        s = step(term.body, sig)
        if s is not None:
            return Lam(term.var, term.var_type, s)
    return None


def reduce(term: Term, signature="lambdaS", fuel: int = 10_000) -> Reduction:
    """Normalize ``term``; raises ``FuelExhausted`` with the partial reduct."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    sig = get_signature(signature)
    steps = 0
    while True:
        nxt = step(term, sig)
        if nxt is None:
            return Reduction(term, steps)
        if steps == fuel:
            raise FuelExhausted(term, steps)
        term = nxt
        steps += 1


@dataclass(frozen=True)
class CriticalPair:
    rules: tuple
    overlap: Term
    left: Term
    right: Term
    joinable: bool


def _unify_args(a1, a2) -> Optional[tuple]:
    """Bindings making two flat argument lists equal, or ``None``."""
    b1, b2 = {}, {}
    for k, (p, q) in enumerate(zip(a1, a2)):
        if isinstance(p, Const) and isinstance(q, Const) and p.name != q.name:
            return None
        t = p if isinstance(p, Const) else q if isinstance(q, Const) else Meta(f"X{k}", p.type)
        for pat, b in ((p, b1), (q, b2)):
            if isinstance(pat, Meta):
                if b.setdefault(pat.name, t) != t:
                    return None
    return b1, b2


def critical_pairs(signature) -> list:
    """Root overlaps between distinct rules, with their joinability.

    Rule arguments are constants or metavariables, none of which is a redex,
    so overlaps can only occur at the root.
    """
    sig = get_signature(signature)
    rules = list(sig.rules)
    out = []
    for i, r1 in enumerate(rules):
        for r2 in rules[i + 1:]:
            h1, a1 = spine(r1.lhs)
            h2, a2 = spine(r2.lhs)
            if h1.name != h2.name or len(a1) != len(a2):
                continue
            found = _unify_args(a1, a2)
            if found is None:
                continue
            b1, b2 = found
            left = reduce(instantiate(r1.rhs, b1), sig).term
            right = reduce(instantiate(r2.rhs, b2), sig).term
            out.append(CriticalPair((r1.name, r2.name), instantiate(r1.lhs, b1), left, right, alpha_equal(left, right)))
    return out

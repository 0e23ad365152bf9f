"""Typed lambda terms, printing, alpha-equivalence and substitution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from ..errors import TermTypeError
from ..simpletypes import Arrow, SimpleType


@dataclass(frozen=True)
class Var:
    name: str
    type: SimpleType


@dataclass(frozen=True)
class Const:
    name: str
    type: SimpleType


@dataclass(frozen=True)
class Meta:
    """A metavariable; only appears in rewrite-rule patterns."""

    name: str
    type: SimpleType


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"

    @cached_property
    def type(self) -> SimpleType:
        ft = self.fn.type
        if not isinstance(ft, Arrow):
            raise TermTypeError(self.fn, "an arrow type", ft)
        return ft.res


@dataclass(frozen=True)
class Lam:
    var: str
    var_type: SimpleType
    body: "Term"

    @cached_property
    def type(self) -> SimpleType:
        return Arrow(self.var_type, self.body.type)


Term = Union[Var, Const, Meta, App, Lam]


def apps(head: Term, *args: Term) -> Term:
    out = head
    for a in args:
        out = App(out, a)
    return out


def lams(binders, body: Term) -> Term:
    """``lams([("x", bool), ("y", bool)], M)`` is ``\\x:bool. \\y:bool. M``."""
    for name, ty in reversed(list(binders)):
        body = Lam(name, ty, body)
    return body


def spine(term: Term):
    """Split ``h M1 ... Mn`` into ``(h, [M1, ..., Mn])``."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    return term, args[::-1]


def pretty(term: Term) -> str:
    if isinstance(term, (Var, Const, Meta)):
        return term.name
    if isinstance(term, Lam):
        return f"\\{term.var}:{term.var_type}. {pretty(term.body)}"
    fn = pretty(term.fn)
    if isinstance(term.fn, Lam):
        fn = f"({fn})"
    arg = pretty(term.arg)
    if isinstance(term.arg, (App, Lam)):
        arg = f"({arg})"
    return f"{fn} {arg}"


def depth(term: Term) -> int:
    """Syntax-tree depth; leaves have depth 1."""
    if isinstance(term, App):
        return 1 + max(depth(term.fn), depth(term.arg))
    if isinstance(term, Lam):
        return 1 + depth(term.body)
    return 1


def size(term: Term) -> int:
    if isinstance(term, App):
        return 1 + size(term.fn) + size(term.arg)
    if isinstance(term, Lam):
        return 1 + size(term.body)
    return 1


def free_vars(term: Term) -> frozenset:
    if isinstance(term, Var):
        return frozenset([term.name])
    if isinstance(term, App):
        return free_vars(term.fn) | free_vars(term.arg)
    if isinstance(term, Lam):
        return free_vars(term.body) - {term.var}
    return frozenset()


def constants(term: Term) -> frozenset:
    if isinstance(term, Const):
        return frozenset([term.name])
    if isinstance(term, App):
        return constants(term.fn) | constants(term.arg)
    if isinstance(term, Lam):
        return constants(term.body)
    return frozenset()


def to_debruijn(term: Term, scope=()):
    """Nameless form: bound variables become ``("bv", k)``, free ones keep names."""
    if isinstance(term, Var):
        for k, name in enumerate(reversed(scope)):
            if name == term.name:
                return ("bv", k)
        return ("fv", term.name, term.type)
    if isinstance(term, Const):
        return ("c", term.name)
    if isinstance(term, Meta):
        return ("m", term.name)
    if isinstance(term, App):
        return ("app", to_debruijn(term.fn, scope), to_debruijn(term.arg, scope))
    return ("lam", term.var_type, to_debruijn(term.body, scope + (term.var,)))


def alpha_equal(a: Term, b: Term) -> bool:
    return to_debruijn(a) == to_debruijn(b)


def _fresh(base: str, avoid) -> str:
    stem = base.rstrip("0123456789") or "v"
    for k in itertools.count(1):
        cand = f"{stem}{k}"
        if cand not in avoid:
            return cand


def substitute(term: Term, name: str, value: Term) -> Term:
    """Capture-avoiding ``term[name := value]``."""
    if isinstance(term, Var):
        return value if term.name == name else term
    if isinstance(term, (Const, Meta)):
        return term
    if isinstance(term, App):
        return App(substitute(term.fn, name, value), substitute(term.arg, name, value))
    if term.var == name:
        return term
    fv = free_vars(value)
    if term.var in fv:
        new = _fresh(term.var, fv | free_vars(term.body) | {name})
        body = substitute(term.body, term.var, Var(new, term.var_type))
        return Lam(new, term.var_type, substitute(body, name, value))
    return Lam(term.var, term.var_type, substitute(term.body, name, value))


def instantiate(pattern: Term, binding: dict) -> Term:
    """Replace metavariables in a rule pattern."""
    if isinstance(pattern, Meta):
        return binding[pattern.name]
    if isinstance(pattern, App):
        return App(instantiate(pattern.fn, binding), instantiate(pattern.arg, binding))
    if isinstance(pattern, Lam):
        return Lam(pattern.var, pattern.var_type, instantiate(pattern.body, binding))
    return pattern

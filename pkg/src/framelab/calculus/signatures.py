"""Constant signatures and delta rules of the applied calculi."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..simpletypes import BOOL, arrow
from .terms import Const, Meta, Term, apps, constants, spine


@dataclass(frozen=True)
class RewriteScheme:
    name: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        head, args = spine(self.lhs)
        if not isinstance(head, Const):
            raise ValueError(f"rule {self.name}: left side must be headed by a constant")
        if not all(isinstance(a, (Const, Meta)) for a in args):
            raise ValueError(f"rule {self.name}: arguments must be constants or metavariables")
        if not _metas(self.rhs) <= _metas(self.lhs):
            raise ValueError(f"rule {self.name}: right side uses unbound metavariables")

    @property
    def head(self) -> str:
        return spine(self.lhs)[0].name

    @property
    def metavariables(self) -> list:
        seen = []
        for a in spine(self.lhs)[1]:
            if isinstance(a, Meta) and a not in seen:
                seen.append(a)
        return seen

    def mentions(self, name: str) -> bool:
        return name in constants(self.lhs) | constants(self.rhs)

    def __str__(self):
        from .terms import pretty

        return f"{pretty(self.lhs)} -> {pretty(self.rhs)}"


def _metas(term):
    if isinstance(term, Meta):
        return {term.name}
    h, args = spine(term)
    out = set()
    for a in args:
        out |= _metas(a)
    return out


@dataclass(frozen=True)
class Signature:
    name: str
    constants: dict = field(hash=False)
    rules: tuple = ()

    def const(self, name: str) -> Const:
        return Const(name, self.constants[name])

    def __contains__(self, name):
        return name in self.constants


B3 = arrow(BOOL, BOOL, BOOL)
B4 = arrow(BOOL, BOOL, BOOL, BOOL)

TRUE = Const("true", BOOL)
FALSE = Const("false", BOOL)
OMEGA = Const("omega", BOOL)
IF = Const("if", B4)
POR = Const("por", B3)

_M = Meta("M", BOOL)
_N = Meta("N", BOOL)

IF_RULES = (
    RewriteScheme("if-true", apps(IF, TRUE, _M, _N), _M),
    RewriteScheme("if-false", apps(IF, FALSE, _M, _N), _N),
)
POR_RULES = (
    RewriteScheme("por-left", apps(POR, TRUE, _M), TRUE),
    RewriteScheme("por-right", apps(POR, _M, TRUE), TRUE),
    RewriteScheme("por-false", apps(POR, FALSE, FALSE), FALSE),
)

LAMBDA = Signature("lambda", {})
LAMBDA_S = Signature("lambdaS", {"true": BOOL, "false": BOOL, "if": B4}, IF_RULES)
LAMBDA_C = Signature(
    "lambdaC",
    {"true": BOOL, "false": BOOL, "if": B4, "omega": BOOL, "por": B3},
    IF_RULES + POR_RULES,
)

SIGNATURES = {s.name.lower(): s for s in (LAMBDA, LAMBDA_S, LAMBDA_C)}


def get_signature(name) -> Signature:
    if isinstance(name, Signature):
        return name
    key = str(name).lower().replace("_", "").replace("-", "")
    aliases = {"lambdas": "lambdas", "s": "lambdas", "lambdac": "lambdac", "c": "lambdac", "lambda": "lambda", "pure": "lambda"}
    try:
        return SIGNATURES[aliases[key]]
    except KeyError:
        raise ValueError(f"unknown signature {name!r} (expected lambda, lambdaS or lambdaC)") from None

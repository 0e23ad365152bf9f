"""Surface syntax for terms, and the type checker.

Grammar::

    type  := tyatom ('->' type)?          tyatom := 'bool' | '(' type ')'
    term  := lam | app
    lam   := ('\\' | 'λ') binder+ '.' term    binder := ident ':' type
    app   := atom+ lam?                   atom   := ident | '(' term ')'

Line comments start with ``#``.
"""

from __future__ import annotations

import re

from ..errors import TermSyntaxError, TermTypeError, UnboundVariable, UnknownConstant
from ..simpletypes import BOOL, Arrow
from .signatures import Signature, get_signature
from .terms import App, Const, Lam, Meta, Term, Var

KEYWORDS = {"true", "false", "if", "omega", "por"}
VARIABLE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")

_TOKENS = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<lam>\\|λ)
  | (?P<punct>[:.()])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if not m:
            raise TermSyntaxError(pos, ["a token"], text[pos])
        kind = m.lastgroup
        if kind != "ws":
            value = m.group(kind)
            out.append((kind if kind in ("ident",) else value, value, pos))
        pos = m.end()
    out.append(("<eof>", "<eof>", len(text)))
    return out


class _Parser:
    def __init__(self, text, signature, context):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = signature
        self.scope = [dict(context)]

    @property
    def peek(self):
        return self.toks[self.i]

    def expect(self, kind, what=None):
        tok = self.peek
        if tok[0] != kind:
            raise TermSyntaxError(tok[2], [what or kind], tok[1])
        self.i += 1
        return tok

    # types
    def type_(self):
        tok = self.peek
        if tok[0] == "ident" and tok[1] == "bool":
            self.i += 1
            left = BOOL
        elif tok[0] == "(":
            self.i += 1
            left = self.type_()
            self.expect(")")
        else:
            raise TermSyntaxError(tok[2], ["bool", "("], tok[1])
        if self.peek[0] == "->":
            self.i += 1
            return Arrow(left, self.type_())
        return left

    # terms
    def term(self):
        if self.peek[0] in ("\\", "λ"):
            return self.lam()
        return self.app()

    def lam(self):
        self.i += 1
        binders = []
        while True:
            name = self.expect("ident", "a variable")
            if not VARIABLE.match(name[1]) or name[1] in KEYWORDS or name[1] == "bool":
                raise TermSyntaxError(name[2], ["a variable name"], name[1])
            self.expect(":")
            binders.append((name[1], self.type_()))
            if self.peek[0] == ".":
                self.i += 1
                break
            if self.peek[0] != "ident":
                raise TermSyntaxError(self.peek[2], [".", "another binder"], self.peek[1])
        self.scope.append({})
        for name, ty in binders:
            self.scope[-1][name] = ty
            self.scope.append({})
        body = self.term()
        for _ in binders:
            self.scope.pop()
        self.scope.pop()
        for name, ty in reversed(binders):
            body = Lam(name, ty, body)
        return body

    def app(self):
        head = self.atom()
        while True:
            tok = self.peek
            if tok[0] in ("ident", "("):
                arg = self.atom()
            elif tok[0] in ("\\", "λ"):
                arg = self.lam()
            else:
                return head
            head = _check_app(head, arg)

    def atom(self):
        tok = self.peek
        if tok[0] == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok[0] != "ident":
            raise TermSyntaxError(tok[2], ["a variable", "a constant", "(", "\\"], tok[1])
        self.i += 1
        name = tok[1]
        if name in KEYWORDS:
            if name not in self.sig.constants:
                raise UnknownConstant(f"constant {name!r} is not part of {self.sig.name}")
            return Const(name, self.sig.constants[name])
        if not VARIABLE.match(name):
            raise TermSyntaxError(tok[2], ["a variable name"], name)
        for frame in reversed(self.scope):
            if name in frame:
                return Var(name, frame[name])
        raise UnboundVariable(f"unbound variable {name!r} at offset {tok[2]}")


def _check_app(fn, arg):
    ft = fn.type
    if not isinstance(ft, Arrow):
        raise TermTypeError(fn, "an arrow type", ft)
    if ft.arg != arg.type:
        raise TermTypeError(arg, ft.arg, arg.type)
    return App(fn, arg)


def parse_term(text: str, signature="lambdaS", context=None) -> Term:
    """Parse and type-check a term; free variables must be typed in ``context``."""
    sig = get_signature(signature)
    p = _Parser(text, sig, context or {})
    if p.peek[0] == "<eof>":
        raise TermSyntaxError(p.peek[2], ["a term"], "end of input")
    t = p.term()
    if p.peek[0] != "<eof>":
        raise TermSyntaxError(p.peek[2], ["end of input"], p.peek[1])
    return t


def typecheck(term: Term, context=None, signature="lambdaS"):
    """Return the type of ``term`` under ``context``, or raise."""
    sig = get_signature(signature)
    return _tc(term, dict(context or {}), sig)


def _tc(term, ctx, sig: Signature):
    if isinstance(term, Var):
        if term.name not in ctx:
            raise UnboundVariable(f"unbound variable {term.name!r}")
        if term.type is not None and term.type != ctx[term.name]:
            raise TermTypeError(term, ctx[term.name], term.type)
        return ctx[term.name]
    if isinstance(term, Const):
        if term.name not in sig.constants:
            raise UnknownConstant(f"constant {term.name!r} is not part of {sig.name}")
        if term.type != sig.constants[term.name]:
            raise TermTypeError(term, sig.constants[term.name], term.type)
        return term.type
    if isinstance(term, Meta):
        return term.type
    if isinstance(term, App):
        ft = _tc(term.fn, ctx, sig)
        at = _tc(term.arg, ctx, sig)
        if not isinstance(ft, Arrow):
            raise TermTypeError(term.fn, "an arrow type", ft)
        if ft.arg != at:
            raise TermTypeError(term.arg, ft.arg, at)
        return ft.res
    inner = dict(ctx)
    inner[term.var] = term.var_type
    return Arrow(term.var_type, _tc(term.body, inner, sig))

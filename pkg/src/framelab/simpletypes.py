"""Simple types over the single ground type ``bool``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Union

from .errors import TermSyntaxError


@dataclass(frozen=True)
class Bool:
    def __str__(self):
        return "bool"

    @property
    def order(self) -> int:
        return 0

    @property
    def arrows(self) -> int:
        return 0

    @property
    def is_arrow(self) -> bool:
        return False


@dataclass(frozen=True)
class Arrow:
    arg: "SimpleType"
    res: "SimpleType"

    def __str__(self):
        left = f"({self.arg})" if isinstance(self.arg, Arrow) else str(self.arg)
        return f"{left} -> {self.res}"

    @cached_property
    def order(self) -> int:
        return max(self.arg.order + 1, self.res.order)

    @cached_property
    def arrows(self) -> int:
        return 1 + self.arg.arrows + self.res.arrows

    @property
    def is_arrow(self) -> bool:
        return True


SimpleType = Union[Bool, Arrow]

BOOL = Bool()


def arrow(*types: SimpleType) -> SimpleType:
    """``arrow(a, b, c)`` is ``a -> b -> c`` (right associative)."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Arrow(t, out)
    return out


def uncurry(t: SimpleType) -> tuple:
    """Split ``s1 -> ... -> sn -> bool`` into ``((s1, ..., sn), bool)``."""
    args = []
    while isinstance(t, Arrow):
        args.append(t.arg)
        t = t.res
    return tuple(args), t


def subtypes(t: SimpleType) -> list:
    """All distinct subtypes of ``t`` (including ``t``), smallest first."""
    seen = []

    def walk(u):
        if isinstance(u, Arrow):
            walk(u.arg)
            walk(u.res)
        if u not in seen:
            seen.append(u)

    walk(t)
    return seen


_TOKEN = re.compile(r"\s*(?:(bool)|(->)|(\()|(\)))")


def parse_type(text: str) -> SimpleType:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TermSyntaxError(pos, ["bool", "->", "(", ")"], text[pos:pos + 8])
        tokens.append((m.group(0).strip(), m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    t, i = _parse_type_tokens(tokens, 0)
    if tokens[i][0] != "<eof>":
        raise TermSyntaxError(tokens[i][1], ["end of input"], tokens[i][0])
    return t


def _parse_type_tokens(tokens, i):
    tok, pos = tokens[i]
    if tok == "bool":
        left, i = BOOL, i + 1
    elif tok == "(":
        left, i = _parse_type_tokens(tokens, i + 1)
        if tokens[i][0] != ")":
            raise TermSyntaxError(tokens[i][1], [")"], tokens[i][0])
        i += 1
    else:
        raise TermSyntaxError(pos, ["bool", "("], tok)
    if tokens[i][0] == "->":
        right, i = _parse_type_tokens(tokens, i + 1)
        return Arrow(left, right), i
    return left, i


def all_types(max_arrows: int) -> Iterator[SimpleType]:
    """Every type with at most ``max_arrows`` arrows, by arrow count then text."""
    by_size = {0: [BOOL]}
    for k in range(1, max_arrows + 1):
        level = []
        for a in range(k):
            for left in by_size[a]:
                for right in by_size[k - 1 - a]:
                    level.append(Arrow(left, right))
        by_size[k] = sorted(level, key=str)
    for k in range(max_arrows + 1):
        yield from by_size[k]


def types_up_to(max_order: int = 2, max_arrows: int = 2) -> list:
    return [t for t in all_types(max_arrows) if t.order <= max_order]

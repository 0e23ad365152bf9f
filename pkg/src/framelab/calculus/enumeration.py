"""Bounded enumeration of closed eta-long beta-normal terms."""

from __future__ import annotations

import itertools
from functools import lru_cache

from ..simpletypes import Arrow, SimpleType, parse_type, uncurry
from .signatures import get_signature
from .terms import App, Const, Lam, Var

_NAMES = ("x", "y", "z", "u", "v", "w")


def level_name(level: int) -> str:
    if level < len(_NAMES):
        return _NAMES[level]
    return f"x{level}"


def enumerate_closed_terms(signature, type_, depth: int):
    """Yield every closed eta-long beta-normal term of ``type_`` with tree depth
    at most ``depth``, shallowest first, each exactly once."""
    sig = get_signature(signature)
    if isinstance(type_, str):
        type_ = parse_type(type_)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    consts = tuple(Const(n, t) for n, t in sig.constants.items())
    gen = _Generator(consts)
    for k in range(1, depth + 1):
        yield from gen.exact((), type_, k)


class _Generator:
    def __init__(self, consts):
        self.consts = consts
        self.exact = lru_cache(maxsize=None)(self._exact)

    def _exact(self, ctx: tuple, ty: SimpleType, k: int) -> tuple:
        if k < 1:
            return ()
        if isinstance(ty, Arrow):
            name = level_name(len(ctx))
            return tuple(Lam(name, ty.arg, b) for b in self.exact(ctx + (ty.arg,), ty.res, k - 1))
        heads = [Var(level_name(i), t) for i, t in enumerate(ctx)] + list(self.consts)
        out = []
        for h in heads:
            arg_types, _ = uncurry(h.type)
            n = len(arg_types)
            if n == 0:
                if k == 1:
                    out.append(h)
                continue
            if n + 1 > k:
                continue
            # argument i (0-based) sits n - i levels below the root
            limits = [k - (n - i) for i in range(n)]
            for ds in itertools.product(*[range(1, lim + 1) for lim in limits]):
                if max([n + 1] + [(n - i) + d for i, d in enumerate(ds)]) != k:
                    continue
                pools = [self.exact(ctx, t, d) for t, d in zip(arg_types, ds)]
                for args in itertools.product(*pools):
                    term = h
                    for a in args:
                        term = App(term, a)
                    out.append(term)
        return tuple(out)

"""Environment-based interpretation of terms in the four frames.

Constants are stored as uncurried ground tables (all constants of the
calculi here are first order), so soundness checks can run on tables that
are not themselves frame elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .calculus.signatures import Signature, get_signature
from .calculus.terms import App, Const, Lam, Meta, Term, Var, constants as term_constants, pretty, spine
from .errors import MissingConstantInterpretation, ModelConditionFailed, TypeMismatch
from .frames import BOT, FF, TOP, TT, Element, Family, build_layer, parse_family
from .simpletypes import BOOL, Arrow, SimpleType, uncurry


def _if_table(family: Family) -> np.ndarray:
    vals = family.values
    g = len(vals)
    t = np.zeros((g, g, g), dtype=np.int64)
    for d, e, f in itertools.product(range(g), repeat=3):
        v = vals[d]
        if v == TT:
            out = e
        elif v == FF:
            out = f
        elif family is Family.C:
            out = family.index(BOT)
        elif family is Family.E:
            out = family.index(TOP)
        else:
            # L: bot stays bot, top stays top
            out = d
        t[d, e, f] = out
    return t


def _ge(a, b):
    rank = {BOT: 0, TT: 1, FF: 1, TOP: 2}
    return a == b or rank[a] > rank[b] and (b == BOT or a == TOP)


def _por_table(family: Family) -> np.ndarray:
    vals = family.values
    g = len(vals)
    t = np.zeros((g, g), dtype=np.int64)
    for d, e in itertools.product(range(g), repeat=2):
        a, b = vals[d], vals[e]
        has_tt = _ge(a, TT) or _ge(b, TT)
        has_ff = _ge(a, FF) and _ge(b, FF)
        if has_tt and has_ff:
            out = TOP
        elif has_tt:
            out = TT
        elif has_ff:
            out = FF
        else:
            out = BOT
        t[d, e] = family.index(out)
    return t


CONSTANT_TYPES = {
    "true": BOOL,
    "false": BOOL,
    "omega": BOOL,
    "if": Arrow(BOOL, Arrow(BOOL, Arrow(BOOL, BOOL))),
    "por": Arrow(BOOL, Arrow(BOOL, BOOL)),
}


@dataclass
class ConstantInterpretation:
    """Uncurried ground tables of the constants available in one family."""

    family: Family
    tables: dict = field(default_factory=dict)

    @classmethod
    def canonical(cls, family) -> "ConstantInterpretation":
        family = parse_family(family)
        tabs = {
            "true": np.array(family.index(TT)),
            "false": np.array(family.index(FF)),
            "if": _if_table(family),
        }
        if family in (Family.C, Family.L):
            tabs["omega"] = np.array(family.index(BOT))
            tabs["por"] = _por_table(family)
        return cls(family, tabs)

    def with_table(self, name: str, table) -> "ConstantInterpretation":
        tabs = dict(self.tables)
        tabs[name] = np.asarray(table, dtype=np.int64)
        return ConstantInterpretation(self.family, tabs)

    def table(self, name: str) -> np.ndarray:
        try:
            return self.tables[name]
        except KeyError:
            raise MissingConstantInterpretation(
                f"constant {name!r} has no interpretation in {self.family.value}"
            ) from None

    def require(self, names) -> None:
        missing = sorted(n for n in names if n not in self.tables)
        if missing:
            raise MissingConstantInterpretation(
                f"no interpretation of {', '.join(missing)} in {self.family.value}"
            )

    def element(self, name: str, budget=None) -> Element:
        """The constant as a frame element; raises if its table is not monotone."""
        ty = CONSTANT_TYPES[name]
        return Interpreter(self.family, self, budget).interpret(Const(name, ty))


_canonical_cache: dict = {}


def canonical_constants(family) -> ConstantInterpretation:
    family = parse_family(family)
    c = _canonical_cache.get(family)
    if c is None:
        c = _canonical_cache[family] = ConstantInterpretation.canonical(family)
    return c


@dataclass(frozen=True)
class _Closure:
    lam: Lam
    env: dict


@dataclass(frozen=True)
class _Partial:
    name: str
    args: tuple


class Interpreter:
    """Evaluates terms to element indices of one family.

    Abstractions are kept as closures while they are only applied; they are
    tabulated over the argument layer when their value is actually needed.
    """

    def __init__(self, family, constants: Optional[ConstantInterpretation] = None, budget=None):
        self.family = parse_family(family)
        self.consts = constants or canonical_constants(self.family)
        self.budget = budget

    def layer(self, ty):
        return build_layer(self.family, ty, self.budget)

    def eval(self, term: Term, env: dict):
        if isinstance(term, (Var, Meta)):
            return env[term.name]
        if isinstance(term, Const):
            tab = self.consts.table(term.name)
            if tab.ndim == 0:
                return int(tab)
            return _Partial(term.name, ())
        if isinstance(term, Lam):
            return _Closure(term, env)
        f = self.eval(term.fn, env)
        a = self.eval(term.arg, env)
        return self.apply(f, a, term.fn.type)

    def apply(self, f, a, fn_type: Arrow):
        if isinstance(f, _Closure):
            env = dict(f.env)
            env[f.lam.var] = a
            return self.eval(f.lam.body, env)
        if isinstance(f, _Partial):
            args = f.args + (self.materialize(a, fn_type.arg),)
            tab = self.consts.table(f.name)
            if len(args) == tab.ndim:
                return int(tab[args])
            return _Partial(f.name, args)
        layer = self.layer(fn_type)
        return int(layer.tables[f, self.materialize(a, fn_type.arg)])

    def materialize(self, value, ty: SimpleType) -> int:
        if isinstance(value, (int, np.integer)):
            return int(value)
        layer = self.layer(ty)
        row = [self.materialize(self.apply(value, d, ty), ty.res) for d in range(layer.arg.size)]
        idx = int(layer.index_many(np.array([row]))[0])
        if idx < 0:
            raise ModelConditionFailed(
                f"function {row} is not an element of {self.family.value} at {ty}"
            )
        return idx

    def interpret(self, term: Term, env: Optional[dict] = None) -> Element:
        values = {}
        for name, v in (env or {}).items():
            values[name] = v.index if isinstance(v, Element) else int(v)
        ty = term.type
        idx = self.materialize(self.eval(term, values), ty)
        return self.layer(ty).element(idx)


def interpret(term: Term, family, env: Optional[dict] = None, signature=None, constants=None, budget=None) -> Element:
    """The denotation of ``term`` in ``family`` under ``env`` (name -> Element)."""
    family = parse_family(family)
    consts = constants or canonical_constants(family)
    if signature is not None:
        consts.require(get_signature(signature).constants)
    else:
        consts.require(term_constants(term))
    for name, v in (env or {}).items():
        if isinstance(v, Element) and v.family is not family:
            raise TypeMismatch(f"environment binds {name} to a {v.family.value} element")
    _check_env(term, env or {})
    return Interpreter(family, consts, budget).interpret(term, env)


def _check_env(term, env, bound=frozenset()):
    if isinstance(term, Var) and term.name not in bound:
        v = env.get(term.name)
        if v is None:
            from .errors import UnboundVariable

            raise UnboundVariable(f"no value for free variable {term.name!r}")
        if isinstance(v, Element) and v.type != term.type:
            raise TypeMismatch(f"{term.name} is declared {term.type} but bound to a {v.type} element")
    elif isinstance(term, App):
        _check_env(term.fn, env, bound)
        _check_env(term.arg, env, bound)
    elif isinstance(term, Lam):
        _check_env(term.body, env, bound | {term.var})


# soundness -------------------------------------------------------------------


@dataclass
class RuleVerdict:
    rule: str
    passed: bool
    instantiations: int
    counterexample: Optional[dict] = None

    def to_dict(self):
        return {
            "rule": self.rule,
            "passed": self.passed,
            "instantiations": self.instantiations,
            "counterexample": self.counterexample,
        }


@dataclass
class SoundnessReport:
    signature: str
    family: Family
    constants_in_frame: dict
    rules: list

    @property
    def passed(self) -> bool:
        return all(self.constants_in_frame.values()) and all(r.passed for r in self.rules)

    def failing(self) -> list:
        return [r for r in self.rules if not r.passed]

    def to_dict(self):
        return {
            "signature": self.signature,
            "family": self.family.value,
            "passed": self.passed,
            "constants_in_frame": self.constants_in_frame,
            "rules": [r.to_dict() for r in self.rules],
        }


def is_monotone_table(table: np.ndarray, family: Family) -> bool:
    """Monotonicity of an uncurried first-order ground table."""
    q = family.ground_poset.matrix
    if table.ndim == 0:
        return True
    g = len(family.values)
    for axis in range(table.ndim):
        for a, b in itertools.product(range(g), repeat=2):
            if a != b and q[a, b]:
                lo = np.take(table, a, axis=axis)
                hi = np.take(table, b, axis=axis)
                if not q[lo, hi].all():
                    return False
    return True


def validate_delta_soundness(signature, family, constants: Optional[ConstantInterpretation] = None, budget=None) -> SoundnessReport:
    """Check every delta rule denotationally over all metavariable instantiations."""
    sig = get_signature(signature)
    family = parse_family(family)
    consts = constants or canonical_constants(family)
    consts.require(sig.constants)
    in_frame = {name: is_monotone_table(consts.table(name), family) for name in sig.constants}
    interp = Interpreter(family, consts, budget)
    verdicts = []
    for rule in sig.rules:
        metas = rule.metavariables
        layers = [build_layer(family, m.type, budget) for m in metas]
        count = 0
        bad = None
        for combo in itertools.product(*[range(l.size) for l in layers]):
            env = {m.name: v for m, v in zip(metas, combo)}
            count += 1
            lhs = interp.materialize(interp.eval(rule.lhs, env), rule.lhs.type)
            rhs = interp.materialize(interp.eval(rule.rhs, env), rule.rhs.type)
            if lhs != rhs:
                lay = build_layer(family, rule.lhs.type, budget)
                bad = {
                    "instantiation": {m.name: l.literal(v) for m, l, v in zip(metas, layers, combo)},
                    "lhs": lay.literal(lhs),
                    "rhs": lay.literal(rhs),
                }
                break
        verdicts.append(RuleVerdict(str(rule), bad is None, count, bad))
    return SoundnessReport(sig.name, family, in_frame, verdicts)


def uncurried_tables(layer) -> np.ndarray:
    """Tables of a first-order layer as an ``(n, g, ..., g)`` ground array."""
    if layer.is_ground:
        return np.arange(layer.size)
    inner = uncurried_tables(layer.res)
    if not layer.arg.is_ground:
        raise TypeMismatch(f"{layer.type} is not first order")
    return inner[layer.tables.astype(np.int64)]


def _eval_pattern(pattern, binding, consts, cand_name, cand):
    """Vectorized value of a first-order pattern for every candidate table."""
    if isinstance(pattern, Meta):
        return binding[pattern.name]
    head, args = spine(pattern)
    vals = [_eval_pattern(a, binding, consts, cand_name, cand) for a in args]
    if head.name == cand_name:
        idx = (np.arange(cand.shape[0]),) + tuple(vals)
        return cand[idx]
    return consts.table(head.name)[tuple(vals)] if vals else consts.table(head.name)


def unique_sound_constant(name: str, signature, family, constants=None, budget=None) -> list:
    """All elements at the constant's type that make its delta rules sound."""
    sig = get_signature(signature)
    family = parse_family(family)
    consts = constants or canonical_constants(family)
    others = [n for n in sig.constants if n != name]
    consts.require(others)
    layer = build_layer(family, sig.constants[name], budget)
    cand = uncurried_tables(layer)
    ok = np.ones(layer.size, dtype=bool)
    g = len(family.values)
    for rule in sig.rules:
        if not rule.mentions(name):
            continue
        metas = rule.metavariables
        if any(m.type != BOOL for m in metas):
            raise TypeMismatch("only ground metavariables are supported here")
        for combo in itertools.product(range(g), repeat=len(metas)):
            binding = {m.name: v for m, v in zip(metas, combo)}
            lhs = _eval_pattern(rule.lhs, binding, consts, name, cand)
            rhs = _eval_pattern(rule.rhs, binding, consts, name, cand)
            ok &= np.broadcast_to(np.asarray(lhs) == np.asarray(rhs), ok.shape)
    return [layer.element(int(i)) for i in np.nonzero(ok)[0]]


@dataclass
class SoundSet:
    """Every monotone table for one constant that its delta rules allow."""

    constant: str
    family: Family
    count: int
    sample: list
    canonical_sound: bool
    method: str

    def to_dict(self):
        return {
            "constant": self.constant,
            "family": self.family.value,
            "count": self.count,
            "sample": [np.asarray(t).tolist() for t in self.sample],
            "canonical_sound": self.canonical_sound,
            "method": self.method,
        }


def _rule_pins(name, sig, consts, g) -> Optional[dict]:
    """Table entries fixed by the rules headed by ``name``; ``None`` on conflict."""
    pins = {}
    for rule in sig.rules:
        if not rule.mentions(name):
            continue
        if rule.head != name or name in term_constants(rule.rhs):
            raise TypeMismatch(f"rule {rule.name} does not pin entries of {name} directly")
        metas = rule.metavariables
        for combo in itertools.product(range(g), repeat=len(metas)):
            binding = {m.name: v for m, v in zip(metas, combo)}
            key = tuple(
                binding[a.name] if isinstance(a, Meta) else int(consts.table(a.name)) for a in spine(rule.lhs)[1]
            )
            val = int(_eval_pattern(rule.rhs, binding, consts, None, None))
            if pins.setdefault(key, val) != val:
                return None
    return pins


def sound_interpretations(name: str, signature, family, constants=None, budget=None, limit: int = 16) -> SoundSet:
    """Count the sound interpretations of a constant row by row.

    Fixing the first argument leaves an element of the layer one arrow down,
    so the whole layer at the constant's type is never built. Monotonicity in
    the first argument is the pointwise order between rows.
    """
    sig = get_signature(signature)
    family = parse_family(family)
    consts = constants or canonical_constants(family)
    consts.require(n for n in sig.constants if n != name)
    ty = sig.constants[name]
    g = len(family.values)
    leq = family.ground_poset.matrix
    pins = _rule_pins(name, sig, consts, g)
    canon = consts.tables.get(name)
    canonical_sound = (
        canon is not None
        and pins is not None
        and all(int(canon[k]) == v for k, v in pins.items())
        and is_monotone_table(np.asarray(canon), family)
    )
    if pins is None or not isinstance(ty, Arrow):
        return SoundSet(name, family, 0 if pins is None else 1, [], canonical_sound, "rows")
    rows = uncurried_tables(build_layer(family, ty.res, budget))
    cands = {}
    for d in range(g):
        ok = np.ones(len(rows), dtype=bool)
        for key, v in pins.items():
            if key[0] == d:
                ok &= rows[(slice(None),) + key[1:]] == v
        cands[d] = np.nonzero(ok)[0]
    order = sorted(range(g), key=lambda d: len(cands[d]))
    axes = tuple(range(1, rows.ndim))

    def below(a, bs):
        return leq[rows[a][None], rows[bs]].all(axis=axes) if axes else leq[rows[a], rows[bs]]

    def above(a, bs):
        return leq[rows[bs], rows[a][None]].all(axis=axes) if axes else leq[rows[bs], rows[a]]

    count, sample = 0, []

    def extend(k, chosen):
        nonlocal count
        d = order[k]
        ok = np.ones(len(cands[d]), dtype=bool)
        for e, r in chosen.items():
            if leq[e, d]:
                ok &= below(r, cands[d])
            elif leq[d, e]:
                ok &= above(r, cands[d])
        live = cands[d][ok]
        if k == g - 1:
            count += len(live)
            for r in live[: max(0, limit - len(sample))]:
                full = {**chosen, d: int(r)}
                sample.append(np.stack([rows[full[x]] for x in range(g)]))
            return
        for r in live:
            extend(k + 1, {**chosen, d: int(r)})

    extend(0, {})
    return SoundSet(name, family, count, sample, canonical_sound, "rows")

"""Exact saturation of definable elements at types of order at most two.

A closed eta-long normal term of type ``s1 -> ... -> sk -> bool`` is
``\\x1..xk. M`` where ``M`` is built from the ground constants and the
variables by applying constants and variables of first-order type to ground
arguments. Its denotation is a function from environments to ground values,
so the definable elements are the closure of the seed rows under the heads
acting pointwise. Rows from several families are concatenated, which yields
the set of denotation tuples of one and the same term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .calculus.enumeration import level_name
from .calculus.signatures import get_signature
from .calculus.terms import Const, Term, Var, apps, lams
from .errors import BudgetExceeded, ModelConditionFailed, TypeMismatch
from .frames import FF, TT, Family, build_layer, default_budget, parse_family
from .semantics import Interpreter, canonical_constants, uncurried_tables
from .simpletypes import BOOL, Arrow, SimpleType, parse_type, uncurry

DEFAULT_WORK = 50_000_000
CHUNK = 1 << 20


def _void(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    return a.view(np.dtype((np.void, a.shape[1] * a.itemsize))).ravel()


def _keys(rows: np.ndarray) -> np.ndarray:
    """Sortable 1-D keys for rows of ground values (all below 4): two bits a value,
    packed into 64-bit words."""
    n, w = rows.shape
    if w == 0:
        return np.zeros(n, dtype=np.uint64)
    words = []
    for s in range(0, w, 32):
        block = rows[:, s : s + 32].astype(np.uint64)
        shifts = (2 * np.arange(block.shape[1], dtype=np.uint64))
        words.append((block << shifts).sum(axis=1, dtype=np.uint64))
    if len(words) == 1:
        return words[0]
    return _void(np.stack(words, axis=1))


def _first_unique(rows: np.ndarray) -> np.ndarray:
    """Sorted indices of the first occurrence of each distinct row."""
    _, first = np.unique(_keys(rows), return_index=True)
    return np.sort(first)


@dataclass
class _Head:
    term: Term
    arity: int
    funcs: list  # one pointwise function per family segment
    selector: Optional[list] = None  # per segment fixed-value table when the head is an if
    # per segment: for each first-argument value, does the output still depend on the second?
    binary: Optional[list] = None


def _selector_fix(table: np.ndarray, family: Family):
    """For an if-like table return, per condition value, the fixed output
    (``-1`` on tt/ff), or ``None`` if the table does not select."""
    g = len(family.values)
    tt, ff = family.index(TT), family.index(FF)
    fix = np.full(g, -1, dtype=np.int64)
    for d in range(g):
        sl = table[d]
        if d == tt:
            if not all((sl[e, :] == e).all() for e in range(g)):
                return None
        elif d == ff:
            if not all((sl[:, f] == f).all() for f in range(g)):
                return None
        else:
            if not (sl == sl[0, 0]).all():
                return None
            fix[d] = sl[0, 0]
    return fix


@dataclass
class Saturation:
    """Definable rows for one type, with provenance for witness terms."""

    signature: str
    families: tuple
    type: SimpleType
    context: tuple
    widths: tuple
    rows: np.ndarray
    heads: list
    prov_head: np.ndarray
    prov_args: np.ndarray
    passes: int
    budget: int
    _bodies: list = field(default_factory=list, repr=False)
    _indices: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.rows)

    @property
    def exact(self) -> bool:
        return True

    def segment(self, k: int) -> np.ndarray:
        lo = sum(self.widths[:k])
        return self.rows[:, lo : lo + self.widths[k]]

    def indices(self, k: int = 0) -> np.ndarray:
        """Element indices at ``self.type`` of the ``k``-th family's denotations."""
        if k not in self._indices:
            self._indices[k] = rows_to_indices(self.segment(k), self.families[k], self.context, self.budget)
        return self._indices[k]

    def tuples(self) -> np.ndarray:
        """Distinct denotation tuples, one column per family."""
        cols = [self.indices(k) for k in range(len(self.families))]
        return np.unique(np.stack(cols, axis=1), axis=0)

    def _build_bodies(self):
        for i in range(len(self._bodies), len(self.rows)):
            head = self.heads[self.prov_head[i]]
            args = [self._bodies[int(a)] for a in self.prov_args[i, : head.arity]]
            self._bodies.append(apps(head.term, *args))

    def body(self, i: int) -> Term:
        self._build_bodies()
        return self._bodies[i]

    def witness(self, i: int) -> Term:
        binders = [(level_name(j), t) for j, t in enumerate(self.context)]
        return lams(binders, self.body(i))

    def find(self, index: int, k: int = 0) -> Optional[int]:
        """A row whose ``k``-th denotation is element ``index``, if any."""
        hit = np.nonzero(self.indices(k) == index)[0]
        return int(hit[0]) if len(hit) else None

    def verify(self) -> None:
        """Re-evaluate every witness body with the interpreter, environment by
        environment; raises ``ModelConditionFailed`` on any disagreement."""
        self._build_bodies()
        names = [level_name(j) for j in range(len(self.context))]
        off = 0
        for fam, width in zip(self.families, self.widths):
            interp = Interpreter(fam, canonical_constants(fam), self.budget)
            sizes = [build_layer(fam, t, self.budget).size for t in self.context]
            for e, combo in enumerate(itertools.product(*[range(s) for s in sizes])):
                env = dict(zip(names, combo))
                memo: dict = {}
                for i, body in enumerate(self._bodies):
                    v = _eval_memo(interp, body, env, memo)
                    if v != self.rows[i, off + e]:
                        raise ModelConditionFailed(
                            f"saturation row {i} disagrees with its witness in {fam.value}"
                        )
            off += width


def _eval_memo(interp: Interpreter, term: Term, env: dict, memo: dict) -> int:
    key = id(term)
    if key in memo:
        return memo[key][1]
    if isinstance(term, (Var, Const)):
        v = interp.eval(term, env)
    else:
        from .calculus.terms import spine

        head, args = spine(term)
        vals = [_eval_memo(interp, a, env, memo) for a in args]
        v = interp.eval(head, env)
        ht = head.type
        for a in vals:
            v = interp.apply(v, a, ht)
            ht = ht.res
        v = interp.materialize(v, ht)
    memo[key] = (term, v)
    return v


def rows_to_indices(vals: np.ndarray, family, context, budget=None) -> np.ndarray:
    """Curry rows of ground values over environments into element indices."""
    family = parse_family(family)
    n = len(vals)
    if not context:
        return vals[:, 0].astype(np.int64)
    sizes = [build_layer(family, t, budget).size for t in context]
    cur = vals.astype(np.int64).reshape((n, *sizes))
    for j in range(len(context) - 1, -1, -1):
        ty = BOOL
        for t in reversed(context[j:]):
            ty = Arrow(t, ty)
        layer = build_layer(family, ty, budget)
        idx = layer.index_many(cur.reshape(-1, sizes[j]))
        if (idx < 0).any():
            raise ModelConditionFailed(f"a definable function is not an element of {family.value} at {ty}")
        cur = idx.reshape((n, *sizes[:j]))
    return cur.reshape(n)


def saturate(signature, families, type_, budget=None, work_budget: int = DEFAULT_WORK) -> Saturation:
    """Closure of the definable denotation rows of ``type_`` (order at most two)."""
    sig = get_signature(signature)
    if isinstance(families, (str, Family)):
        families = (families,)
    families = tuple(parse_family(f) for f in families)
    if isinstance(type_, str):
        type_ = parse_type(type_)
    if type_.order > 2:
        raise TypeMismatch(f"exact saturation needs a type of order at most 2, got {type_}")
    budget = budget or default_budget()
    ctx, _ = uncurry(type_)
    for fam in families:
        canonical_constants(fam).require(sig.constants)
        # rows are only useful if they can be indexed in the layer of the type
        build_layer(fam, type_, budget)

    # environments and seeds per family
    widths, comps, var_tabs = [], [], []
    for fam in families:
        layers = [build_layer(fam, t, budget) for t in ctx]
        sizes = [l.size for l in layers]
        n_env = int(np.prod(sizes, dtype=np.int64)) if sizes else 1
        if n_env > budget:
            raise BudgetExceeded(f"environments of {type_} in {fam.value}", budget)
        widths.append(n_env)
        grid = np.unravel_index(np.arange(n_env), sizes) if sizes else ()
        comps.append([np.asarray(g, dtype=np.int64) for g in grid])
        var_tabs.append([uncurried_tables(l) for l in layers])
    width = sum(widths)

    heads: list = []
    seed_rows = []

    def seg_const(fam, v, w):
        return np.full(w, v, dtype=np.uint8)

    for name, ty in sig.constants.items():
        if ty == BOOL:
            heads.append(_Head(Const(name, ty), 0, []))
            seed_rows.append(np.concatenate([
                seg_const(f, int(canonical_constants(f).table(name)), w) for f, w in zip(families, widths)
            ]))
    for j, t in enumerate(ctx):
        v = Var(level_name(j), t)
        if t == BOOL:
            heads.append(_Head(v, 0, []))
            seed_rows.append(np.concatenate([c[j].astype(np.uint8) for c in comps]))
        else:
            args, _ = uncurry(t)
            funcs = []
            for k in range(len(families)):
                tab, ec = var_tabs[k][j], comps[k][j]
                funcs.append(lambda *a, tab=tab, ec=ec: tab[(ec,) + a])
            heads.append(_Head(v, len(args), funcs))
    for name, ty in sig.constants.items():
        if ty == BOOL:
            continue
        args, _ = uncurry(ty)
        funcs, fixes = [], []
        for fam in families:
            tab = canonical_constants(fam).table(name)
            funcs.append(lambda *a, tab=tab: tab[a])
            fixes.append(_selector_fix(tab, fam) if len(args) == 3 else None)
        sel = fixes if all(f is not None for f in fixes) else None
        binary = None
        if len(args) == 2:
            binary = []
            for fam in families:
                tab = canonical_constants(fam).table(name)
                binary.append(np.array([not (tab[d] == tab[d, 0]).all() for d in range(len(tab))]))
        heads.append(_Head(Const(name, ty), len(args), funcs, sel, binary))

    eng = _Engine(families, widths, heads, work_budget)
    for hid, row in zip([i for i, h in enumerate(heads) if h.arity == 0], seed_rows):
        eng.add(row[None, :], np.full(1, hid), np.full((1, 3), -1))
    passes = eng.run()
    return Saturation(
        sig.name, families, type_, tuple(ctx), tuple(widths), eng.rows[: eng.n].copy(), heads,
        eng.prov_head[: eng.n].copy(), eng.prov_args[: eng.n].copy(), passes, budget,
    )


class _Engine:
    def __init__(self, families, widths, heads, work_budget):
        self.families = families
        self.widths = widths
        self.bounds = np.cumsum([0] + list(widths))
        self.heads = heads
        self.work_budget = work_budget
        self.work = 0
        w = int(self.bounds[-1])
        self.rows = np.zeros((64, w), dtype=np.uint8)
        self.prov_head = np.zeros(64, dtype=np.int64)
        self.prov_args = np.zeros((64, 3), dtype=np.int64)
        self.n = 0
        self.keys = _keys(self.rows[:0])
        self.pending = []
        self.pending_rows = 0
        tt = np.concatenate([np.full(wd, f.index(TT)) for f, wd in zip(families, widths)])
        ff = np.concatenate([np.full(wd, f.index(FF)) for f, wd in zip(families, widths)])
        self.tt_code, self.ff_code = tt, ff

    def _charge(self, k):
        self.work += k
        if self.work > self.work_budget:
            raise BudgetExceeded("saturation work", self.work_budget, f"{self.n} rows so far")

    def queue(self, cand, head, args):
        """Collect candidates; they are merged by ``flush``."""
        if len(cand):
            self.pending.append((cand, np.broadcast_to(np.asarray(head), (len(cand),)), args))
            self.pending_rows += len(cand)
            if self.pending_rows >= CHUNK * 4:
                self.flush()

    def flush(self):
        if not self.pending:
            return
        cand = np.concatenate([p[0] for p in self.pending])
        head = np.concatenate([p[1] for p in self.pending])
        args = np.concatenate([p[2] for p in self.pending])
        self.pending = []
        self.pending_rows = 0
        self.add(cand, head, args)

    def add(self, cand, head, args):
        if len(cand) == 0:
            return
        keys = _keys(cand)
        uk, first = np.unique(keys, return_index=True)
        fresh = ~np.isin(uk, self.keys) if self.n else np.ones(len(uk), dtype=bool)
        sel = np.sort(first[fresh])
        if len(sel) == 0:
            return
        k = len(sel)
        while self.n + k > len(self.rows):
            grow = len(self.rows)
            self.rows = np.concatenate([self.rows, np.zeros_like(self.rows[:grow])])
            self.prov_head = np.concatenate([self.prov_head, np.zeros(grow, dtype=np.int64)])
            self.prov_args = np.concatenate([self.prov_args, np.zeros((grow, 3), dtype=np.int64)])
        self.rows[self.n : self.n + k] = cand[sel]
        self.prov_head[self.n : self.n + k] = head[sel] if np.ndim(head) else head
        self.prov_args[self.n : self.n + k] = args[sel]
        self.n += k
        self.keys = np.concatenate([self.keys, keys[sel]])

    def run(self) -> int:
        lo = 0
        passes = 0
        while lo < self.n:
            hi = self.n
            passes += 1
            for hid, head in enumerate(self.heads):
                if head.arity == 0:
                    continue
                if head.selector is not None:
                    self._selector_round(hid, head, lo, hi)
                elif head.binary is not None:
                    self._binary_round(hid, head, lo, hi)
                else:
                    self._generic_round(hid, head, lo, hi)
                self.flush()
            lo = hi
        return passes

    def _apply(self, head, argrows):
        out = np.empty(argrows[0].shape, dtype=np.uint8)
        for k, (a, b) in enumerate(zip(self.bounds[:-1], self.bounds[1:])):
            vals = tuple(r[..., a:b].astype(np.int64) for r in argrows)
            out[..., a:b] = head.funcs[k](*vals)
        return out

    def _generic_round(self, hid, head, lo, hi):
        m = head.arity
        R = self.rows[:hi]
        old, new, every = np.arange(lo), np.arange(lo, hi), np.arange(hi)
        for p in range(m):
            lists = [old] * p + [new] + [every] * (m - 1 - p)
            for combo in _combos(lists):
                self._charge(len(combo))
                cand = self._apply(head, [R[combo[:, i]] for i in range(m)])
                args = np.full((len(combo), 3), -1, dtype=np.int64)
                args[:, :m] = combo
                self.queue(cand, hid, args)

    def _selector_round(self, hid, head, lo, hi):
        R = self.rows[:hi]
        fix = np.concatenate([
            f[R[:, a:b].astype(np.int64)] for f, a, b in zip(head.selector, self.bounds[:-1], self.bounds[1:])
        ], axis=1)
        is_t = R == self.tt_code
        is_f = R == self.ff_code
        cache: dict = {}

        def restrictions(mask):
            key = mask.tobytes()
            if key not in cache:
                cache[key] = _first_unique(R[:, mask]) if mask.any() else np.zeros(1, dtype=np.int64)
            return cache[key]

        for a in range(hi):
            tm, fm = is_t[a], is_f[a]
            bs, cs = restrictions(tm), restrictions(fm)
            if a >= lo:
                pairs = [(bs, cs)]
            else:
                pairs = [(bs[bs >= lo], cs), (bs[bs < lo], cs[cs >= lo])]
            for b_ids, c_ids in pairs:
                if len(b_ids) == 0 or len(c_ids) == 0:
                    continue
                bb, cc = np.meshgrid(b_ids, c_ids, indexing="ij")
                bb, cc = bb.ravel(), cc.ravel()
                self._charge(len(bb))
                cand = np.where(tm, R[bb], np.where(fm, R[cc], fix[a].astype(np.uint8)))
                args = np.stack([np.full(len(bb), a), bb, cc], axis=1)
                self.queue(cand, hid, args)


    def _binary_round(self, hid, head, lo, hi):
        R = self.rows[:hi]
        live = np.concatenate([
            f[R[:, a:b].astype(np.int64)] for f, a, b in zip(head.binary, self.bounds[:-1], self.bounds[1:])
        ], axis=1)
        cache: dict = {}
        for a in range(hi):
            mask = live[a]
            key = mask.tobytes()
            if key not in cache:
                cache[key] = _first_unique(R[:, mask]) if mask.any() else np.zeros(1, dtype=np.int64)
            bs = cache[key]
            if a < lo:
                bs = bs[bs >= lo]
            if len(bs) == 0:
                continue
            self._charge(len(bs))
            cand = self._apply(head, [np.broadcast_to(R[a], (len(bs), R.shape[1])), R[bs]])
            args = np.stack([np.full(len(bs), a), bs, np.full(len(bs), -1)], axis=1)
            self.queue(cand, hid, args)


def _combos(lists):
    """Cartesian products of index arrays, in chunks of at most ``CHUNK`` rows."""
    if any(len(l) == 0 for l in lists):
        return
    rest = lists[1:]
    rest_n = int(np.prod([len(l) for l in rest], dtype=np.int64)) if rest else 1
    if rest:
        grids = np.meshgrid(*rest, indexing="ij")
        tail = np.stack([g.ravel() for g in grids], axis=1)
    else:
        tail = np.zeros((1, 0), dtype=np.int64)
    step = max(1, CHUNK // rest_n)
    first = lists[0]
    for s in range(0, len(first), step):
        head = first[s : s + step]
        yield np.concatenate([np.repeat(head, rest_n)[:, None], np.tile(tail, (len(head), 1))], axis=1)

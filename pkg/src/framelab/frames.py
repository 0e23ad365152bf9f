"""The four type frames S, C, E and L as memoized per-type layers.

Every layer element is identified with its full table, so element indices
are canonical: ground values are ordered bot, tt, ff, top (absent values
skipped) and arrow layers list their monotone tables lexicographically.
"""

from __future__ import annotations

import enum
import json
import os
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BudgetExceeded,
    FamilyMismatch,
    NoSuchElement,
    NotMonotone,
    TypeMismatch,
)
from .order import DEFAULT_BUDGET, PointwisePoset, Poset, is_monotone, monotone_tables
from .simpletypes import BOOL, Arrow, SimpleType, parse_type

BOT, TT, FF, TOP = 0, 1, 2, 3
VALUE_NAMES = ("bot", "tt", "ff", "top")


class Family(str, enum.Enum):
    S = "S"
    C = "C"
    E = "E"
    L = "L"

    @property
    def values(self) -> tuple:
        """Canonical ground values present in this family, in index order."""
        return _GROUND_VALUES[self]

    def index(self, value: int) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise NoSuchElement(f"{VALUE_NAMES[value]} is not a ground value of {self.value}") from None

    def has(self, value: int) -> bool:
        return value in self.values

    @property
    def ground_poset(self) -> Poset:
        return _GROUND_POSETS[self]


_GROUND_VALUES = {
    Family.S: (TT, FF),
    Family.C: (BOT, TT, FF),
    Family.E: (TT, FF, TOP),
    Family.L: (BOT, TT, FF, TOP),
}


def _ground_poset(family):
    vals = _GROUND_VALUES[family]
    if family is Family.S:
        return Poset.discrete(2, names=[VALUE_NAMES[v] for v in vals])
    rank = {BOT: 0, TT: 1, FF: 1, TOP: 2}
    m = [[a == b or rank[a] < rank[b] for b in vals] for a in vals]
    return Poset(m, names=[VALUE_NAMES[v] for v in vals])


_GROUND_POSETS = {f: _ground_poset(f) for f in Family}


def parse_family(text) -> Family:
    if isinstance(text, Family):
        return text
    try:
        return Family(str(text).upper())
    except ValueError:
        raise ValueError(f"unknown frame family {text!r} (expected S, C, E or L)") from None


def default_budget() -> int:
    env = os.environ.get("FRAMELAB_BUDGET")
    if env:
        value = int(env)
        if value <= 0:
            raise ValueError("FRAMELAB_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET


class FrameLayer:
    """One family at one type: its elements, their order and their tables."""

    def __init__(self, family: Family, type_: SimpleType, poset: Poset, tables=None, arg=None, res=None):
        self.family = family
        self.type = type_
        self.poset = poset
        self.size = poset.size
        self.tables = tables
        self.arg = arg
        self.res = res
        self._codes = None
        self._lookup = None
        if tables is not None:
            self._build_lookup()

    def _build_lookup(self):
        m, k = self.res.size, self.arg.size
        if k * np.log2(max(m, 2)) < 62:
            radix = np.array([m ** (k - 1 - c) for c in range(k)], dtype=np.int64)
            self._radix = radix
            self._codes = self.tables.astype(np.int64) @ radix
        else:
            self._lookup = {tuple(int(v) for v in row): i for i, row in enumerate(self.tables)}

    def __repr__(self):
        return f"FrameLayer({self.family.value}, {self.type}, size={self.size})"

    def __len__(self):
        return self.size

    @property
    def is_ground(self) -> bool:
        return self.tables is None

    def table(self, index: int) -> tuple:
        return tuple(int(v) for v in self.tables[index])

    def element(self, index: int) -> "Element":
        if not 0 <= index < self.size:
            raise NoSuchElement(f"index {index} out of range for {self}")
        return Element(self, int(index))

    def elements(self):
        return [Element(self, i) for i in range(self.size)]

    def ground(self, value: int) -> "Element":
        if not self.is_ground:
            raise TypeMismatch(f"{self.type} is not ground")
        return Element(self, self.family.index(value))

    def index_many(self, tables: np.ndarray) -> np.ndarray:
        """Indices of many tables at once; ``-1`` where a table is absent."""
        tables = np.asarray(tables)
        if len(tables) == 0:
            return np.zeros(0, dtype=np.int64)
        if self._codes is not None:
            codes = tables.astype(np.int64) @ self._radix
            pos = np.searchsorted(self._codes, codes)
            pos_c = np.minimum(pos, self.size - 1)
            ok = self._codes[pos_c] == codes
            ok &= (tables >= 0).all(axis=1) & (tables < self.res.size).all(axis=1)
            return np.where(ok, pos_c, -1)
        return np.array([self._lookup.get(tuple(int(v) for v in row), -1) for row in tables], dtype=np.int64)

    def index_of(self, table) -> int:
        t = [int(v) for v in table]
        if len(t) != self.arg.size:
            raise NoSuchElement(f"table has {len(t)} entries, {self.type} needs {self.arg.size}")
        if any(v < 0 or v >= self.res.size for v in t):
            raise NoSuchElement(f"table {t} has entries outside {self.res.type}")
        if not is_monotone(t, self.arg.poset, self.res.poset):
            raise NotMonotone(f"table {t} is not monotone at {self.type} in {self.family.value}")
        idx = int(self.index_many(np.array([t]))[0])
        if idx < 0:
            raise NoSuchElement(f"no element with table {t} at {self.type}")
        return idx

    # literals ---------------------------------------------------------------

    def literal(self, index: int):
        """JSON-ready literal: ground names, or a table keyed by domain index."""
        if self.is_ground:
            return VALUE_NAMES[self.family.values[index]]
        return {str(i): self.res.literal(int(v)) for i, v in enumerate(self.tables[index])}

    def text(self, index: int) -> str:
        if self.is_ground:
            return VALUE_NAMES[self.family.values[index]]
        keys = (
            [VALUE_NAMES[v] for v in self.family.values]
            if self.arg.is_ground
            else [f"#{i}" for i in range(self.arg.size)]
        )
        body = ", ".join(f"{k}: {self.res.text(int(v))}" for k, v in zip(keys, self.tables[index]))
        return "{" + body + "}"

    def parse_literal(self, obj) -> int:
        """Inverse of ``literal``; also accepts ``#k``/integer indices and JSON text."""
        if isinstance(obj, str):
            s = obj.strip()
            if s.startswith("#") and s[1:].isdigit():
                return self.element(int(s[1:])).index
            if s.isdigit():
                return self.element(int(s)).index
            if s in VALUE_NAMES and self.is_ground:
                return self.family.index(VALUE_NAMES.index(s))
            if s[:1] in "[{":
                return self.parse_literal(json.loads(s))
            raise NoSuchElement(f"cannot read {obj!r} as an element of {self.type}")
        if isinstance(obj, int):
            return self.element(obj).index
        if self.is_ground:
            raise NoSuchElement(f"{obj!r} is not a ground literal")
        if isinstance(obj, dict):
            items = [obj[str(i)] if str(i) in obj else obj[self.arg.text(i)] for i in range(self.arg.size)]
        else:
            items = list(obj)
        return self.index_of([self.res.parse_literal(v) for v in items])


@dataclass(frozen=True, eq=False)
class Element:
    layer: FrameLayer
    index: int

    @property
    def family(self) -> Family:
        return self.layer.family

    @property
    def type(self) -> SimpleType:
        return self.layer.type

    @property
    def table(self) -> tuple:
        return self.layer.table(self.index)

    def literal(self):
        return self.layer.literal(self.index)

    def __str__(self):
        return self.layer.text(self.index)

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.layer.family is other.layer.family
            and self.layer.type == other.layer.type
            and self.index == other.index
        )

    def __hash__(self):
        return hash((self.layer.family, self.layer.type, self.index))

    def __call__(self, x: "Element") -> "Element":
        return apply(self, x)


_memo: dict = {}
_failed: dict = {}
_locks: dict = {}
_memo_lock = threading.Lock()


def _key_lock(key):
    with _memo_lock:
        lock = _locks.get(key)
        if lock is None:
            lock = _locks[key] = threading.Lock()
        return lock


def build_layer(family, type_, budget: Optional[int] = None) -> FrameLayer:
    """The memoized layer of ``family`` at ``type_``.

    Raises ``BudgetExceeded`` (naming the offending sub-type) when any layer
    on the way would hold more than ``budget`` elements.
    """
    family = parse_family(family)
    if isinstance(type_, str):
        type_ = parse_type(type_)
    if budget is None:
        budget = default_budget()
    if budget <= 0:
        raise ValueError("budget must be positive")
    key = (family, type_)
    layer = _memo.get(key)
    if layer is None:
        with _key_lock(key):
            layer = _memo.get(key)
            if layer is None:
                if _failed.get(key, 0) >= budget:
                    raise BudgetExceeded(f"{family.value} layer at {type_}", budget)
                try:
                    layer = _construct(family, type_, budget)
                except BudgetExceeded as exc:
                    _failed[key] = max(_failed.get(key, 0), budget)
                    if exc.what.endswith(f"at {type_}"):
                        raise
                    raise BudgetExceeded(f"{family.value} layer at {type_}", budget, str(exc)) from exc
                _memo[key] = layer
    if layer.size > budget:
        raise BudgetExceeded(f"{family.value} layer at {type_}", budget, f"{layer.size} elements")
    return layer


def _construct(family, type_, budget):
    if not isinstance(type_, Arrow):
        return FrameLayer(family, BOOL, family.ground_poset)
    arg = build_layer(family, type_.arg, budget)
    res = build_layer(family, type_.res, budget)
    what = f"{family.value} layer at {type_}"
    if family is Family.S:
        if res.size ** arg.size > budget:
            raise BudgetExceeded(what, budget, f"{res.size}^{arg.size} set maps")
        tables = monotone_tables(_discrete(arg.size), _discrete(res.size), budget, what)
        poset = PointwisePoset(tables, res.poset, discrete=True)
    else:
        tables = monotone_tables(arg.poset, res.poset, budget, what)
        poset = PointwisePoset(tables, res.poset)
    return FrameLayer(family, type_, poset, tables=tables, arg=arg, res=res)


_discrete_cache: dict = {}


def _discrete(n):
    p = _discrete_cache.get(n)
    if p is None:
        p = _discrete_cache[n] = Poset.discrete(n)
    return p


def clear_cache():
    with _memo_lock:
        _memo.clear()
        _failed.clear()


def apply(f: Element, x: Element) -> Element:
    if f.layer.family is not x.layer.family:
        raise FamilyMismatch(f"cannot apply a {f.family.value} element to a {x.family.value} element")
    if not isinstance(f.type, Arrow) or f.type.arg != x.type:
        raise TypeMismatch(f"cannot apply {f.type} to {x.type}")
    layer = f.layer
    return Element(layer.res, int(layer.tables[f.index, x.index]))


def element_of_table(layer: FrameLayer, table) -> Element:
    if layer.is_ground:
        raise TypeMismatch("ground layers have no tables")
    vals = [v.index if isinstance(v, Element) else int(v) for v in table]
    return Element(layer, layer.index_of(vals))


def ground_element(family, value: int) -> Element:
    return build_layer(family, BOOL).ground(value)

"""Finite posets, monotone-map enumeration and lattice checks."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, MismatchedSpaces, NotMonotone

DEFAULT_BUDGET = 10**6

# Explicit order matrices are materialized only up to this many elements.
MATRIX_LIMIT = 4096

# Posets without a top element can grow dead prefixes during enumeration;
# the prefix frontier may exceed the budget by this factor before we give up.
PREFIX_SLACK = 8


def _index_dtype(m):
    if m <= 0xFF:
        return np.uint8
    if m <= 0xFFFF:
        return np.uint16
    return np.uint32


class Poset:
    """A finite poset on the indices ``0 .. size-1``.

    ``leq`` is any square boolean matrix; it is validated on construction
    unless ``check=False``.
    """

    def __init__(self, leq, names: Optional[Sequence[str]] = None, check: bool = True):
        m = np.asarray(leq, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("order matrix must be square")
        if m.shape[0] < 1:
            raise ValueError("a poset needs at least one element")
        self._matrix = m
        self.size = m.shape[0]
        self.names = tuple(names) if names is not None else None
        self._covers = None
        if check:
            self._validate()

    def _validate(self):
        m = self._matrix
        if not m.diagonal().all():
            raise ValueError("order is not reflexive")
        if (m & m.T & ~np.eye(self.size, dtype=bool)).any():
            raise ValueError("order is not antisymmetric")
        two_step = (m.astype(np.float32) @ m.astype(np.float32)) > 0
        if (two_step & ~m).any():
            raise ValueError("order is not transitive")

    @classmethod
    def discrete(cls, size, names=None):
        return cls(np.eye(size, dtype=bool), names=names, check=False)

    @classmethod
    def from_relation(cls, size, strict_pairs, names=None):
        """Reflexive-transitive closure of ``strict_pairs``."""
        m = np.eye(size, dtype=bool)
        for a, b in strict_pairs:
            m[a, b] = True
        for k in range(size):
            m |= m[:, k : k + 1] & m[k : k + 1, :]
        return cls(m, names=names)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def leq(self, i: int, j: int) -> bool:
        return bool(self._matrix[i, j])

    def submatrix(self, indices: Sequence[int]) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        return self.matrix[np.ix_(idx, idx)]

    @property
    def is_discrete(self) -> bool:
        return not (self.matrix & ~np.eye(self.size, dtype=bool)).any()

    def top(self) -> Optional[int]:
        hits = np.nonzero(self.matrix.all(axis=0))[0]
        return int(hits[0]) if len(hits) else None

    def bottom(self) -> Optional[int]:
        hits = np.nonzero(self.matrix.all(axis=1))[0]
        return int(hits[0]) if len(hits) else None

    def dual(self) -> "Poset":
        return Poset(self.matrix.T.copy(), names=self.names, check=False)

    def lower_covers(self) -> list:
        """Lower covers of every element (``j`` with ``j < i`` and nothing between)."""
        if self._covers is None:
            strict = self.matrix & ~np.eye(self.size, dtype=bool)
            s = strict.astype(np.float32)
            through = (s @ s) > 0
            cov = strict & ~through
            self._covers = [np.nonzero(cov[:, i])[0].tolist() for i in range(self.size)]
        return self._covers

    def index_order_is_linear_extension(self) -> bool:
        return not np.tril(self.matrix, k=-1).any()

    def __repr__(self):
        return f"Poset(size={self.size})"


class PointwisePoset(Poset):
    """Poset of tables ordered pointwise over a codomain poset.

    The order matrix is computed lazily, and only for moderately sized
    posets; ``leq`` and ``submatrix`` work at any size.
    """

    def __init__(self, tables: np.ndarray, codomain: Poset, discrete: bool = False):
        self.tables = tables
        self.codomain = codomain
        self.size = int(tables.shape[0])
        self.names = None
        self._matrix = None
        self._covers = None
        self._discrete = discrete

    @property
    def is_discrete(self) -> bool:
        return self._discrete

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self.size > MATRIX_LIMIT:
                raise BudgetExceeded("explicit order matrix", MATRIX_LIMIT, f"poset has {self.size} elements")
            self._matrix = self.submatrix(range(self.size))
        return self._matrix

    def leq(self, i, j):
        q = self.codomain.matrix
        return bool(q[self.tables[i], self.tables[j]].all())

    def submatrix(self, indices):
        if self._discrete:
            idx = np.asarray(list(indices))
            return idx[:, None] == idx[None, :]
        rows = self.tables[np.asarray(list(indices), dtype=np.int64)].astype(np.int64)
        q = self.codomain.matrix
        out = np.ones((len(rows), len(rows)), dtype=bool)
        for c in range(rows.shape[1]):
            col = rows[:, c]
            out &= q[np.ix_(col, col)]
        return out

    def dual(self):
        return DualPoset(self)


class DualPoset(Poset):
    """Order-reversed view of another poset; never materializes more than asked."""

    def __init__(self, base: Poset):
        self.base = base
        self.size = base.size
        self.names = base.names
        self._matrix = None
        self._covers = None

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self.base.matrix.T.copy()
        return self._matrix

    def leq(self, i, j):
        return self.base.leq(j, i)

    def submatrix(self, indices):
        return self.base.submatrix(indices).T

    @property
    def is_discrete(self) -> bool:
        return self.base.is_discrete

    def dual(self):
        return self.base


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    domain: Poset
    codomain: Poset
    table: tuple

    def __post_init__(self):
        if len(self.table) != self.domain.size:
            raise ValueError("table length does not match the domain")
        if not is_monotone(self.table, self.domain, self.codomain):
            raise NotMonotone(f"table {self.table} is not monotone")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __eq__(self, other):
        return (
            isinstance(other, MonotoneMap)
            and self.domain is other.domain
            and self.codomain is other.codomain
            and self.table == other.table
        )

    def __hash__(self):
        return hash(self.table)


def is_monotone(table: Sequence[int], domain: Poset, codomain: Poset) -> bool:
    t = np.asarray(table, dtype=np.int64)
    if domain.is_discrete:
        return True
    d = domain.matrix
    below, above = np.nonzero(d)
    return bool(codomain.matrix[t[below], t[above]].all())


def monotone_tables(domain: Poset, codomain: Poset, budget: int = DEFAULT_BUDGET, what: str = "monotone maps") -> np.ndarray:
    """All monotone tables ``domain -> codomain`` in lexicographic order.

    Tables are extended one domain position at a time in index order; each
    new value is constrained by the already-placed lower (and upper) neighbours,
    so non-monotone prefixes are dropped as soon as they appear.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    n, m = domain.size, codomain.size
    dtype = _index_dtype(m)
    if domain.is_discrete:
        if m**n > budget:
            raise BudgetExceeded(what, budget, f"{m}^{n} set maps")
        grid = np.array(list(itertools.product(range(m), repeat=n)), dtype=dtype)
        return grid.reshape(m**n, n)

    if domain.index_order_is_linear_extension():
        covers = domain.lower_covers()
        below = covers
        above = [[] for _ in range(n)]
    else:
        dm = domain.matrix
        below = [[j for j in range(i) if dm[j, i]] for i in range(n)]
        above = [[j for j in range(i) if dm[i, j]] for i in range(n)]

    q = codomain.matrix
    cap = budget if codomain.top() is not None else PREFIX_SLACK * budget
    rows = np.zeros((1, 0), dtype=dtype)
    for i in range(n):
        chunk = max(1, (1 << 22) // m)
        parts = []
        produced = 0
        for start in range(0, len(rows), chunk):
            block = rows[start : start + chunk]
            allowed = np.ones((len(block), m), dtype=bool)
            for j in below[i]:
                allowed &= q[block[:, j].astype(np.int64), :]
            for j in above[i]:
                allowed &= q[:, block[:, j].astype(np.int64)].T
            parent, val = np.nonzero(allowed)
            produced += len(parent)
            if produced > cap:
                raise BudgetExceeded(what, budget, f"frontier passed {cap} prefixes at position {i}")
            new = np.empty((len(parent), i + 1), dtype=dtype)
            new[:, :i] = block[parent]
            new[:, i] = val
            parts.append(new)
        rows = np.concatenate(parts) if parts else np.zeros((0, i + 1), dtype=dtype)
    if len(rows) > budget:
        raise BudgetExceeded(what, budget, f"{len(rows)} maps")
    return rows


def enumerate_monotone_maps(domain: Poset, codomain: Poset, budget: int = DEFAULT_BUDGET) -> list:
    tables = monotone_tables(domain, codomain, budget)
    return [MonotoneMap(domain, codomain, tuple(int(v) for v in row)) for row in tables]


class Comparison(str, enum.Enum):
    BELOW = "below"
    ABOVE = "above"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def pointwise_order(f: MonotoneMap, g: MonotoneMap) -> Comparison:
    if f.domain is not g.domain or f.codomain is not g.codomain:
        raise MismatchedSpaces("maps live in different function spaces")
    if f.table == g.table:
        return Comparison.EQUAL
    q = f.codomain.matrix
    a, b = np.asarray(f.table), np.asarray(g.table)
    if q[a, b].all():
        return Comparison.BELOW
    if q[b, a].all():
        return Comparison.ABOVE
    return Comparison.INCOMPARABLE


@dataclass(frozen=True)
class LatticeReport:
    is_lattice: bool
    top: Optional[int] = None
    bottom: Optional[int] = None
    # (a, b, "join" | "meet") for the first pair lacking a bound
    failure: Optional[tuple] = None

    def to_dict(self):
        return {
            "is_lattice": self.is_lattice,
            "top": self.top,
            "bottom": self.bottom,
            "failure": list(self.failure) if self.failure else None,
        }


def _least(candidates, m):
    # element of ``candidates`` below every other candidate
    for u in candidates:
        if m[u, candidates].all():
            return u
    return None


def is_lattice(subset: Iterable[int], ambient: Poset) -> LatticeReport:
    """Check that ``subset`` is a lattice under the order restricted from ``ambient``."""
    elems = sorted(set(int(x) for x in subset))
    if not elems:
        raise ValueError("subset must be nonempty")
    m = ambient.submatrix(elems)
    k = len(elems)
    for a in range(k):
        for b in range(a + 1, k):
            ups = np.nonzero(m[a] & m[b])[0]
            if _least(ups, m) is None:
                return LatticeReport(False, failure=(elems[a], elems[b], "join"))
            downs = np.nonzero(m[:, a] & m[:, b])[0]
            if _least(downs, m.T) is None:
                return LatticeReport(False, failure=(elems[a], elems[b], "meet"))
    top = _least(np.arange(k), m.T)
    bottom = _least(np.arange(k), m)
    return LatticeReport(True, top=elems[top], bottom=elems[bottom])

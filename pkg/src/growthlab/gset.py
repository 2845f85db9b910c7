"""Exact finite-set arithmetic over a group backend.

Sets are immutable, keyed by canonical coordinates, and every operation is
exact: budgets abort a computation rather than truncate it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .config import resolve_budget
from .errors import BudgetExceeded, ParentMismatch
from .groups import Element


class GSet:
    """A finite subset of a group, stored as canonical coordinate tuples."""

    __slots__ = ("parent", "members", "_sorted", "_symmetric")

    def __init__(self, parent, members: Iterable[tuple], *, _reduced: bool = False):
        if _reduced:
            ms = frozenset(members)
        else:
            ms = frozenset(parent.reduce(c) for c in members)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "_sorted", None)
        object.__setattr__(self, "_symmetric", None)

    def __setattr__(self, *a):
        raise AttributeError("GSet is immutable")

    @classmethod
    def from_elements(cls, elements: Iterable[Element]) -> "GSet":
        elements = list(elements)
        if not elements:
            raise ValueError("cannot infer parent of an empty set")
        parent = elements[0].parent
        for e in elements:
            if e.parent != parent:
                raise ParentMismatch("mixed parents")
        return cls(parent, (e.coords for e in elements), _reduced=True)

    @classmethod
    def identity_set(cls, parent) -> "GSet":
        return cls(parent, [parent.identity_coords()], _reduced=True)

    def sorted_members(self) -> tuple[tuple, ...]:
        s = object.__getattribute__(self, "_sorted")
        if s is None:
            s = tuple(sorted(self.members))
            object.__setattr__(self, "_sorted", s)
        return s

    def elements(self) -> Iterator[Element]:
        for c in self.sorted_members():
            yield Element(self.parent, c)

    def min_element(self) -> Element:
        return Element(self.parent, self.sorted_members()[0])

    def is_symmetric(self) -> bool:
        s = object.__getattribute__(self, "_symmetric")
        if s is None:
            inv = self.parent.inv
            s = all(inv(c) in self.members for c in self.members)
            object.__setattr__(self, "_symmetric", s)
        return s

    def contains_identity(self) -> bool:
        return self.parent.identity_coords() in self.members

    def with_parent(self, parent) -> "GSet":
        """Retag coordinates under another parent sharing the coordinate space."""
        return GSet(parent, self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, item):
        coords = item.coords if isinstance(item, Element) else tuple(item)
        return coords in self.members

    def __le__(self, other: "GSet"):
        self._check(other)
        return self.members <= other.members

    def __eq__(self, other):
        return (
            isinstance(other, GSet)
            and self.parent == other.parent
            and self.members == other.members
        )

    def __hash__(self):
        return hash((self.parent, self.members))

    def _check(self, other: "GSet"):
        if self.parent != other.parent:
            raise ParentMismatch("sets live in different parents")

    def union(self, other: "GSet") -> "GSet":
        self._check(other)
        return GSet(self.parent, self.members | other.members, _reduced=True)

    def intersection(self, other: "GSet") -> "GSet":
        self._check(other)
        return GSet(self.parent, self.members & other.members, _reduced=True)

    def difference(self, other: "GSet") -> "GSet":
        self._check(other)
        return GSet(self.parent, self.members - other.members, _reduced=True)

    def filter(self, pred) -> "GSet":
        return GSet(self.parent, (c for c in self.members if pred(c)), _reduced=True)

    def __mul__(self, other: "GSet") -> "GSet":
        return product(self, other)

    def __repr__(self):
        return f"GSet(|{len(self.members)}| over {self.parent!r})"


def product(A: GSet, B: GSet, budget: int | None = None) -> GSet:
    """Exact product set {a*b}."""
    A._check(B)
    budget = resolve_budget(budget)
    small, big = (A, B) if len(A) <= len(B) else (B, A)
    pairs = len(A) * len(B)
    if pairs > budget:
        raise BudgetExceeded("product", pairs, budget)
    mul = A.parent.mul
    out = set()
    if small is A:
        for a in A.members:
            out.update(mul(a, b) for b in B.members)
    else:
        for b in B.members:
            out.update(mul(a, b) for a in A.members)
    if len(out) > budget:
        raise BudgetExceeded("product", len(out), budget)
    return GSet(A.parent, out, _reduced=True)


def inverse_set(A: GSet) -> GSet:
    inv = A.parent.inv
    return GSet(A.parent, (inv(c) for c in A.members), _reduced=True)


def symmetrize(A: GSet) -> GSet:
    """A ∪ A^{-1} ∪ {1}; of the empty set, just {1}."""
    inv = A.parent.inv
    out = set(A.members)
    out.update(inv(c) for c in A.members)
    out.add(A.parent.identity_coords())
    return GSet(A.parent, out, _reduced=True)


def translate(g: Element, A: GSet) -> GSet:
    """Left translate g·A."""
    if g.parent != A.parent:
        raise ParentMismatch("translate: mixed parents")
    mul = A.parent.mul
    gc = g.coords
    return GSet(A.parent, (mul(gc, c) for c in A.members), _reduced=True)


def power_chain(A: GSet, n: int, budget: int | None = None) -> list[GSet]:
    """[A^1, ..., A^n].  Detects stabilization (A^{k+1} = A^k) and reuses it."""
    if n < 1:
        raise ValueError("need n >= 1")
    chain = [A]
    for _ in range(n - 1):
        nxt = product(chain[-1], A, budget)
        if nxt.members == chain[-1].members:
            chain.extend(chain[-1] for _ in range(n - len(chain)))
            break
        chain.append(nxt)
    return chain


def power(A: GSet, n: int, budget: int | None = None) -> GSet:
    """A^n for n >= 1; A^0 is the singleton {1}."""
    if n == 0:
        return GSet.identity_set(A.parent)
    return power_chain(A, n, budget)[-1]


@dataclass(frozen=True)
class GrowthStats:
    """Power sizes |A^1|..|A^n| with doubling and tripling ratios."""

    sizes: tuple[int, ...]
    doubling: Fraction | None
    tripling: Fraction | None

    def csv_rows(self) -> list[tuple]:
        rows = [("m", "size_m", "ratio_m")]
        for m, s in enumerate(self.sizes, start=1):
            rows.append((m, s, str(Fraction(s, self.sizes[0]))))
        return rows


def growth_stats(A: GSet, n: int, budget: int | None = None) -> GrowthStats:
    if not A.contains_identity():
        warnings.warn("growth_stats: 1 is not in A; power sizes need not be monotone")
    chain = power_chain(A, n, budget)
    sizes = tuple(len(S) for S in chain)
    doubling = Fraction(sizes[1], sizes[0]) if n >= 2 else None
    tripling = Fraction(sizes[2], sizes[0]) if n >= 3 else None
    return GrowthStats(sizes, doubling, tripling)

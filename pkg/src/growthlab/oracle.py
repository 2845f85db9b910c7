"""Greedy search for large coset progressions inside the difference body 2A-2A.

This is a desk-scale, fully verified stand-in for the deep density theorems
of additive combinatorics: the search procedure is elementary (subgroup
lattice inside the difference body, popular-difference generator ranking,
greedy bound growth), but every produced object is exactly certified, so
downstream consumers never depend on the quality of the search.

All operations require the members of A to commute pairwise; the ambient
parent may be non-abelian or infinite, since everything happens inside the
finite difference body.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .config import resolve_budget
from .covering import RuzsaCover, ruzsa_cover
from .errors import BudgetExceeded, CertificateError, NotAbelian
from .groups import Element, commutator
from .gset import GSet, inverse_set, product
from .progressions import ProgressionSpec, ordered_progression
from .subgroups import SubgroupHandle


def _require_commuting(A: GSet) -> None:
    elems = list(A.elements())
    for a, b in itertools.combinations(elems, 2):
        if not commutator(a, b).is_identity():
            raise NotAbelian("set members must commute pairwise")


def difference_body(A: GSet, budget: int | None = None) -> GSet:
    """2A - 2A, exactly."""
    budget = resolve_budget(budget)
    A2 = product(A, A, budget)
    neg = inverse_set(A)
    return product(product(A2, neg, budget), neg, budget)


def subgroups_within(D: GSet, budget: int | None = None) -> list[SubgroupHandle]:
    """Every subgroup of the parent contained in D (members must commute).

    Cyclic subgroups are found by walking powers until they cycle or escape D
    (escape is guaranteed for infinite order since D is finite), and general
    subgroups arise as joins, which for commuting sets are plain product sets.
    """
    budget = resolve_budget(budget)
    _require_commuting(D)
    parent = D.parent
    ident = parent.identity_coords()
    if ident not in D.members:
        return []
    mul = parent.mul
    found: set[frozenset] = {frozenset((ident,))}
    for d in D.sorted_members():
        if d == ident:
            continue
        path = {ident}
        cur = d
        while cur != ident:
            if cur not in D.members:
                path = None
                break
            path.add(cur)
            cur = mul(cur, d)
        if path is not None:
            found.add(frozenset(path))
    work = sorted(found, key=lambda s: (len(s), sorted(s)))
    known = set(found)
    while work:
        H1 = work.pop()
        for H2 in list(known):
            join = {mul(a, b) for a in H1 for b in H2}
            if len(join) > len(D):
                continue
            if not join <= D.members:
                continue
            fs = frozenset(join)
            if fs not in known:
                known.add(fs)
                work.append(fs)
                if len(known) > budget:
                    raise BudgetExceeded("subgroups_within", len(known), budget)
    handles = [
        SubgroupHandle(parent, GSet(parent, members, _reduced=True))
        for members in known
    ]
    handles.sort(key=lambda h: (h.order(), h.elements.sorted_members()))
    return handles


@dataclass(frozen=True)
class CosetProgression:
    """H + P with the realized set re-verified against its own definition."""

    H: SubgroupHandle
    generators: tuple[Element, ...]
    bounds: tuple[int, ...]
    realized: GSet

    def __post_init__(self):
        if self.rank:
            spec = ProgressionSpec(self.generators, self.bounds)
            P = ordered_progression(spec)
            check = product(self.H.elements, P)
        else:
            check = self.H.elements
        if check.members != self.realized.members:
            raise CertificateError("realized set disagrees with H + P")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def spec(self) -> ProgressionSpec:
        return ProgressionSpec(self.generators, self.bounds)


@dataclass(frozen=True)
class OracleResult:
    best: CosetProgression
    density: Fraction
    search_log: int
    body_size: int


def _grow_slot(realized: set, x_coords: tuple, D: GSet) -> tuple[set, int]:
    """Extend realized by multiples of x while staying inside D."""
    parent = D.parent
    mul, inv = parent.mul, parent.inv
    xi = inv(x_coords)
    cur = realized
    L = 0
    while True:
        nxt = cur | {mul(w, x_coords) for w in cur} | {mul(w, xi) for w in cur}
        if nxt == cur or not nxt <= D.members:
            return cur, L
        cur = nxt
        L += 1


def find_coset_progression(
    A: GSet,
    rank_max: int = 3,
    budget: int | None = None,
) -> OracleResult:
    """Best coset progression H + P inside 2A - 2A found by greedy search.

    For every subgroup of the difference body, generator candidates are
    ranked by the popular-difference count |A ∩ (A+d)| (ties by canonical
    order) and adopted only when they strictly grow the realized set; the
    winner maximizes realized size, with ties preferring larger subgroup
    part, then lower rank, then canonical generators.
    """
    budget = resolve_budget(budget)
    if len(A) == 0:
        raise ValueError("oracle on the empty set")
    _require_commuting(A)
    parent = A.parent
    D = difference_body(A, budget)
    subs = subgroups_within(D, budget)
    mul = parent.mul
    ident = parent.identity_coords()
    popularity = {}
    for d in D.members:
        if d == ident:
            continue
        shifted = {mul(a, d) for a in A.members}
        popularity[d] = len(shifted & A.members)
    candidates = sorted(popularity, key=lambda d: (-popularity[d], d))
    examined = 0
    best = None
    best_key = None
    for H in subs:
        realized = set(H.elements.members)
        gens: list[Element] = []
        bounds: list[int] = []
        for x in candidates:
            if len(gens) >= rank_max:
                break
            examined += 1
            trial, L = _grow_slot(realized, x, D)
            if L > 0 and len(trial) > len(realized):
                realized = trial
                gens.append(Element(parent, x))
                bounds.append(L)
        cp = CosetProgression(
            H, tuple(gens), tuple(bounds), GSet(parent, realized, _reduced=True)
        )
        key = (
            -len(cp.realized),
            -cp.H.order(),
            cp.rank,
            tuple(g.coords for g in cp.generators),
        )
        if best is None or key < best_key:
            best, best_key = cp, key
    return OracleResult(
        best=best,
        density=Fraction(len(best.realized), len(A)),
        search_log=examined,
        body_size=len(D),
    )


@dataclass(frozen=True)
class SandersCover:
    """A inside X + H + 2P with the Plünnecke size bound checked."""

    cover: RuzsaCover
    doubled: GSet
    ratio: Fraction
    K: Fraction
    size_bound: Fraction

    @property
    def X(self) -> GSet:
        return self.cover.X


def derive_sanders_cover(
    A: GSet,
    res: OracleResult,
    budget: int | None = None,
    K: Fraction | None = None,
) -> SandersCover:
    """Turn an oracle hit into a verified cover A ⊆ X + H + 2P.

    The Ruzsa cover of A by H+P supplies X; doubling P's bounds absorbs the
    difference (H+P) - (H+P), and |H+2P| ≤ K^8 |A| holds because H+2P sits
    inside 4A - 4A.
    """
    budget = resolve_budget(budget)
    cp = res.best
    hull = cp.realized
    rc = ruzsa_cover(A, hull, budget)
    if cp.rank:
        P2 = ordered_progression(cp.spec().scaled(2), budget)
        doubled = product(cp.H.elements, P2, budget)
    else:
        doubled = cp.H.elements
    covered = product(rc.X, doubled, budget)
    if not A <= covered:
        raise CertificateError("doubled progression failed to absorb the difference")
    if K is None:
        K = Fraction(len(product(A, A, budget)), len(A))
    size_bound = K ** 8 * len(A)
    if len(doubled) > size_bound:
        raise CertificateError("doubled hull exceeds the eightfold-growth bound")
    ratio = Fraction(rc.product_size, len(hull))
    return SandersCover(cover=rc, doubled=doubled, ratio=ratio, K=K, size_bound=size_bound)

"""Subgroups, quotients and nilpotency structure.

Everything here is exact and budget-guarded: spans and closures enumerate,
and operations that cannot terminate (infinite subgroups) surface as
BudgetExceeded rather than looping.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .config import resolve_budget
from .errors import BudgetExceeded, NotNilpotent, ParentMismatch
from .groups import Element, commutator
from .gset import GSet


@dataclass(frozen=True)
class SubgroupHandle:
    """An enumerated subgroup with an optional normality verdict.

    is_normal is a tri-state: True once conjugation-stability has been
    verified against `normal_gens` (which implies normality in the group
    those generators generate), False after a failed check, None = unknown.
    """

    parent: object
    elements: GSet
    generators: tuple[Element, ...] = ()
    is_normal: bool | None = None
    normal_gens: frozenset = frozenset()

    def order(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def __contains__(self, item):
        return item in self.elements

    def gen_elements(self) -> list[Element]:
        if self.generators:
            return list(self.generators)
        return list(self.elements.elements())


def _gen_list(gens) -> list[Element]:
    if isinstance(gens, GSet):
        return list(gens.elements())
    if isinstance(gens, SubgroupHandle):
        return gens.gen_elements()
    return list(gens)


def span(gens, budget: int | None = None) -> SubgroupHandle:
    """Smallest subgroup containing gens: closure under product with gens∪gens^-1."""
    budget = resolve_budget(budget)
    gen_elems = _gen_list(gens)
    if not gen_elems:
        raise ValueError("span needs at least one generator (or a parent-tagged GSet)")
    parent = gen_elems[0].parent
    for g in gen_elems:
        if g.parent != parent:
            raise ParentMismatch("span: mixed parents")
    mul, inv = parent.mul, parent.inv
    step_gens = sorted({g.coords for g in gen_elems} | {inv(g.coords) for g in gen_elems})
    members = {parent.identity_coords()}
    frontier = list(members)
    while frontier:
        new = []
        for f in frontier:
            for g in step_gens:
                w = mul(f, g)
                if w not in members:
                    members.add(w)
                    new.append(w)
        if len(members) > budget:
            raise BudgetExceeded("span", len(members), budget)
        frontier = new
    return SubgroupHandle(
        parent,
        GSet(parent, members, _reduced=True),
        generators=tuple(sorted(gen_elems)),
    )


def normal_closure(H, conj_gens, budget: int | None = None) -> SubgroupHandle:
    """Smallest subgroup containing H that is conjugation-stable under conj_gens.

    Stability under a generating set implies normality in the generated group.
    """
    budget = resolve_budget(budget)
    conj = _gen_list(conj_gens)
    base = _gen_list(H)
    if not base:
        raise ValueError("normal_closure of nothing")
    parent = base[0].parent
    mul, inv = parent.mul, parent.inv
    conj_coords = sorted({g.coords for g in conj} | {inv(g.coords) for g in conj})
    pool = [g if isinstance(g, Element) else Element(parent, g) for g in base]
    N = span(pool, budget)
    while True:
        fresh = []
        for x in N.elements.sorted_members():
            for g in conj_coords:
                w = mul(mul(g, x), inv(g))
                if w not in N.elements:
                    fresh.append(Element(parent, w))
        if not fresh:
            break
        N = span(list(N.elements.elements()) + fresh, budget)
    return SubgroupHandle(
        parent,
        N.elements,
        generators=tuple(sorted(pool)),
        is_normal=True,
        normal_gens=frozenset(g.coords for g in conj),
    )


def derived_subgroup(G_gens, budget: int | None = None) -> SubgroupHandle:
    """[G, G] for G = <gens>: normal closure of the generator commutators."""
    gens = _gen_list(G_gens)
    if not gens:
        raise ValueError("derived_subgroup of nothing")
    parent = gens[0].parent
    comms = {commutator(a, b) for a, b in itertools.product(gens, repeat=2)}
    comms = [c for c in comms if not c.is_identity()]
    if not comms:
        triv = SubgroupHandle(
            parent, GSet.identity_set(parent),
            is_normal=True, normal_gens=frozenset(g.coords for g in gens),
        )
        return triv
    return normal_closure(comms, gens, budget)


def check_normal(H: SubgroupHandle, conj_gens, budget: int | None = None) -> SubgroupHandle:
    """Return a copy of H with its normality verdict against conj_gens filled in."""
    gens = _gen_list(conj_gens)
    parent = H.parent
    mul, inv = parent.mul, parent.inv
    ok = True
    for g in gens:
        gc, gi = g.coords, inv(g.coords)
        for x in H.elements.members:
            if mul(mul(gc, x), gi) not in H.elements:
                ok = False
                break
        if not ok:
            break
    return SubgroupHandle(
        parent, H.elements, H.generators,
        is_normal=ok, normal_gens=frozenset(g.coords for g in gens),
    )


def _lcs_next(cur: SubgroupHandle, H: SubgroupHandle, budget: int) -> SubgroupHandle:
    # [cur, H] = normal closure in H of commutators of the two generating sets.
    parent = cur.parent
    comms = set()
    for x in cur.gen_elements():
        for y in H.gen_elements():
            c = commutator(x, y)
            if not c.is_identity():
                comms.add(c)
    if not comms:
        return SubgroupHandle(parent, GSet.identity_set(parent))
    return normal_closure(sorted(comms), H.gen_elements(), budget)


def step_of(H: SubgroupHandle, budget: int | None = None) -> int:
    """Exact nilpotency step via the lower central series; trivial group has step 0."""
    budget = resolve_budget(budget)
    if H.is_trivial():
        return 0
    limit = getattr(H.parent, "structural_step", None) or 1
    cur = H
    for i in range(1, limit + 2):
        nxt = _lcs_next(cur, H, budget)
        if nxt.is_trivial():
            return i
        cur = nxt
    raise NotNilpotent(f"series did not terminate within step {limit}")


def step_of_generated(gens, budget: int | None = None) -> int:
    """Nilpotency step of <gens> computed from generators alone.

    Builds deduplicated left-normed commutator levels L_1 = gens,
    L_{t+1} = {[c, g]}; inside an ambient of structural step S, gamma_t is
    generated by L_t once gamma_{t+1} vanishes, so the step is the largest t
    with a nonvanishing level.  Works in infinite backends where enumeration
    is impossible.
    """
    budget = resolve_budget(budget)
    gen_elems = _gen_list(gens)
    if not gen_elems:
        return 0
    parent = gen_elems[0].parent
    ident = parent.identity_coords()
    gcs = sorted({g.coords for g in gen_elems} - {ident})
    if not gcs:
        return 0
    limit = parent.structural_step
    levels = [set(gcs)]
    mul, inv = parent.mul, parent.inv

    def comm(a, b):
        return mul(mul(inv(a), inv(b)), mul(a, b))

    for _ in range(1, limit + 1):
        nxt = set()
        for c in levels[-1]:
            for g in gcs:
                w = comm(c, g)
                if w != ident:
                    nxt.add(w)
        if len(nxt) > budget:
            raise BudgetExceeded("step_of_generated", len(nxt), budget)
        levels.append(nxt)
    if levels[-1]:
        raise NotNilpotent("nonvanishing commutators beyond the structural step")
    step = 0
    for t, lv in enumerate(levels, start=1):
        if lv:
            step = t
    return step


class QuotientView:
    """G/K presented on canonical coset representatives.

    Wraps a base descriptor and a finite kernel subgroup; every coset is
    represented by its minimal canonical encoding, and arithmetic reduces
    through the base group.  Valid on elements of any subgroup in which the
    kernel is normal (tracked via the kernel's normality verdict).
    """

    def __init__(self, base, kernel: SubgroupHandle):
        if kernel.parent != base:
            raise ParentMismatch("kernel must live in the base group")
        if isinstance(base, QuotientView):
            raise ValueError("views do not nest; quotient the base by the preimage instead")
        self.base = base
        self.kernel = kernel
        self._rep_cache: dict[tuple, tuple] = {}
        self._kernel_sorted = kernel.elements.sorted_members()

    # --- descriptor interface -------------------------------------------
    @property
    def arity(self):
        return self.base.arity

    @property
    def structural_step(self):
        return self.base.structural_step

    def reduce(self, coords):
        c = self.base.reduce(tuple(coords))
        r = self._rep_cache.get(c)
        if r is None:
            mul = self.base.mul
            r = min(mul(c, k) for k in self._kernel_sorted)
            self._rep_cache[c] = r
        return r

    def mul(self, a, b):
        return self.reduce(self.base.mul(a, b))

    def inv(self, a):
        return self.reduce(self.base.inv(a))

    def identity_coords(self):
        return self.base.identity_coords()

    def encode(self, coords):
        return self.base.encode(coords)

    def is_abelian(self):
        if self.base.is_abelian():
            return True
        ident = self.identity_coords()
        gens = self.generator_coords()
        for a, b in itertools.combinations(gens, 2):
            x, y = Element(self, a), Element(self, b)
            if commutator(x, y).coords != ident:
                return False
        return True

    def is_finite(self):
        return self.base.is_finite()

    def order(self):
        o = self.base.order()
        if o is None:
            return None
        return o // len(self.kernel.elements)

    def iter_coords(self):
        seen = set()
        for c in self.base.iter_coords():
            r = self.reduce(c)
            if r not in seen:
                seen.add(r)
                yield r

    def generator_coords(self):
        out = []
        seen = set()
        for c in self.base.generator_coords():
            r = self.reduce(c)
            if r not in seen:
                seen.add(r)
                out.append(r)
        return out

    def identity(self):
        return Element(self, self.identity_coords())

    def element(self, coords):
        return Element(self, self.reduce(tuple(coords)))

    # --- equality ---------------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, QuotientView)
            and self.base == other.base
            and self.kernel.elements.members == other.kernel.elements.members
        )

    def __hash__(self):
        return hash((self.base, self.kernel.elements.members))

    def __repr__(self):
        return f"QuotientView({self.base!r} / |{len(self.kernel.elements)}|)"


def quotient_project(q: QuotientView, A: GSet) -> GSet:
    """Image of A in the quotient, as canonical representatives tagged with q."""
    if A.parent != q.base:
        raise ParentMismatch("set does not live in the base of the quotient")
    return GSet(q, (q.reduce(c) for c in A.members), _reduced=True)


def preimage_subgroup(q: QuotientView, S: SubgroupHandle) -> SubgroupHandle:
    """Full preimage in the base of a subgroup of the quotient."""
    if S.parent != q:
        raise ParentMismatch("subgroup does not live in this quotient")
    mul = q.base.mul
    members = {mul(s, k) for s in S.elements.members for k in q.kernel.elements.members}
    return SubgroupHandle(q.base, GSet(q.base, members, _reduced=True))


def enumerate_parent(parent, budget: int | None = None) -> GSet:
    """All elements of a finite parent as a GSet."""
    budget = resolve_budget(budget)
    out = set()
    for c in parent.iter_coords():
        out.add(c)
        if len(out) > budget:
            raise BudgetExceeded("enumerate_parent", len(out), budget)
    return GSet(parent, out, _reduced=True)

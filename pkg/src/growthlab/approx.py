"""Approximate-group certificates and the covering toolbox built on them.

A certificate for A is a finite witness set X with A symmetric, 1 in A and
A^2 inside X*A; every constructor here re-verifies that containment by exact
product computation, so a certificate in hand is proof, not promise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config import resolve_budget
from .errors import (BudgetExceeded, CertificateError, CosetCountExceeded,
                     NotAbelian, ParentMismatch)
from .groups import Element
from .gset import GSet, inverse_set, power, product
from .subgroups import SubgroupHandle


@dataclass(frozen=True)
class ApproxCertificate:
    """Verified witness that A is a |X|-approximate group."""

    aset: GSet
    witness: GSet
    square_size: int

    @property
    def K_upper(self) -> int:
        return len(self.witness)

    @property
    def K_lower(self) -> Fraction:
        return Fraction(self.square_size, len(self.aset))

    def __post_init__(self):
        if self.aset.parent != self.witness.parent:
            raise ParentMismatch("witness must live with the set")
        if not self.aset.contains_identity():
            raise CertificateError("set must contain the identity")
        if not self.aset.is_symmetric():
            raise CertificateError("set must be symmetric")
        if len(self.witness) == 0:
            raise CertificateError("witness may not be empty")


def certify(aset: GSet, witness: GSet, budget: int | None = None) -> ApproxCertificate:
    """Build a certificate, verifying A^2 <= X*A exactly."""
    budget = resolve_budget(budget)
    square = product(aset, aset, budget)
    covered = product(witness, aset, budget)
    if not square <= covered:
        missing = len(square.members - covered.members)
        raise CertificateError(f"witness fails to cover the square ({missing} elements exposed)")
    return ApproxCertificate(aset, witness, len(square))


def doubling_constant(A: GSet, budget: int | None = None) -> Fraction:
    """|A^2| / |A| exactly."""
    if len(A) == 0:
        raise ValueError("doubling of the empty set")
    return Fraction(len(power(A, 2, budget)), len(A))


def greedy_cover_certificate(A: GSet, budget: int | None = None) -> ApproxCertificate:
    """Certificate with a greedily minimized witness drawn from A^2 itself.

    Any element of A^2 covers at least itself (1 is in A), so the greedy
    always terminates with X inside A^2.
    """
    budget = resolve_budget(budget)
    if not A.contains_identity():
        raise CertificateError("set must contain the identity")
    if not A.is_symmetric():
        raise CertificateError("set must be symmetric")
    square = power(A, 2, budget)
    if len(square) * len(A) > budget:
        raise BudgetExceeded("greedy_cover_certificate", len(square) * len(A), budget)
    masks = {}
    for x in square.sorted_members():
        masks[x] = frozenset(A.parent.mul(x, a) for a in A.members) & square.members
    uncovered = set(square.members)
    chosen = []
    while uncovered:
        best = None
        best_gain = -1
        for x in square.sorted_members():
            gain = len(masks[x] & uncovered)
            if gain > best_gain:
                best, best_gain = x, gain
        chosen.append(best)
        uncovered -= masks[best]
    X = GSet(A.parent, chosen, _reduced=True)
    return ApproxCertificate(A, X, len(square))


@dataclass(frozen=True)
class GrowthRow:
    power: int
    size: int
    bound: int
    within: bool


def growth_law(cert: ApproxCertificate, max_power: int, budget: int | None = None) -> list[GrowthRow]:
    """Exact |A^m| against K^{m-1}|A| for m up to max_power."""
    budget = resolve_budget(budget)
    A = cert.aset
    K = cert.K_upper
    rows = []
    cur = A
    for m in range(1, max_power + 1):
        if m > 1:
            cur = product(cur, A, budget)
        bound = K ** (m - 1) * len(A)
        rows.append(GrowthRow(m, len(cur), bound, len(cur) <= bound))
    return rows


# --------------------------------------------------------------------------
# Slicing covers: powers and intersections by translates of small cores
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SlicingCover:
    """A^m intersect B^n covered by translates of A^2 intersect B^2."""

    target: GSet
    core: GSet
    translates: GSet
    bound: int

    @property
    def count(self) -> int:
        return len(self.translates)


def slicing_cover(
    certA: ApproxCertificate,
    certB: ApproxCertificate,
    m: int,
    n: int,
    budget: int | None = None,
) -> SlicingCover:
    """Cover A^m ∩ B^n by at most K^{m-1} L^{n-1} translates of A^2 ∩ B^2.

    Every element lies in some u*A with u from X_A^{m-1} and some v*B with v
    from X_B^{n-1}; two elements of the same (u, v) slice differ by an element
    of A^2 ∩ B^2, so one witness per nonempty slice covers everything.
    """
    budget = resolve_budget(budget)
    if m < 1 or n < 1:
        raise ValueError("powers must be at least 1")
    A, B = certA.aset, certB.aset
    if A.parent != B.parent:
        raise ParentMismatch("slicing needs a common parent")
    Am = power(A, m, budget)
    Bn = power(B, n, budget)
    target = Am.intersection(Bn)
    core = power(A, 2, budget).intersection(power(B, 2, budget))
    XA = power(certA.witness, m - 1, budget)
    XB = power(certB.witness, n - 1, budget)
    bound = certA.K_upper ** (m - 1) * certB.K_upper ** (n - 1)
    witnesses = []
    remaining = set(target.members)
    mul, inv = A.parent.mul, A.parent.inv
    for u in XA.sorted_members():
        if not remaining:
            break
        uA = frozenset(mul(u, a) for a in A.members)
        for v in XB.sorted_members():
            if not remaining:
                break
            slice_members = remaining & uA
            if not slice_members:
                continue
            vB = frozenset(mul(v, b) for b in B.members)
            slice_members = slice_members & vB
            if not slice_members:
                continue
            c = min(slice_members)
            witnesses.append(c)
            ci = inv(c)
            remaining -= {w for w in slice_members if mul(ci, w) in core.members}
    translates = GSet(A.parent, witnesses, _reduced=True)
    covered = product(translates, core, budget)
    if not target <= covered:
        raise CertificateError("slicing cover failed exact verification")
    if len(translates) > bound:
        raise CertificateError("slicing cover exceeded its bound")
    return SlicingCover(target, core, translates, bound)


def predicate_slice_certificate(
    cert: ApproxCertificate,
    member,
    budget: int | None = None,
) -> ApproxCertificate:
    """Certificate for A^2 ∩ H with witness count at most K^3.

    H is given by a membership predicate on coordinates and must be a
    subgroup (closure is the caller's obligation; the returned certificate is
    re-verified exactly either way, so a non-subgroup can only fail loudly).
    The square of the slice sits in A^4 ∩ H; slicing A^4 by translates u*A
    with u from X^3 and taking one witness per nonempty slice lands the
    witnesses inside H (they are slice members) with displacement in A^2 ∩ H.
    """
    budget = resolve_budget(budget)
    A = cert.aset
    A2 = power(A, 2, budget)
    slice_set = A2.filter(member)
    A4 = product(A2, A2, budget)
    T = A4.filter(member)
    X3 = power(cert.witness, 3, budget)
    mul = A.parent.mul
    witnesses = []
    remaining = set(T.members)
    for u in X3.sorted_members():
        if not remaining:
            break
        uA = frozenset(mul(u, a) for a in A.members)
        hit = remaining & uA
        if not hit:
            continue
        c = min(hit)
        witnesses.append(c)
        ci = A.parent.inv(c)
        remaining -= {w for w in hit if mul(ci, w) in slice_set.members}
    if remaining:
        raise CertificateError("slice cover left elements exposed")
    C = GSet(A.parent, witnesses, _reduced=True)
    if len(C) > cert.K_upper ** 3:
        raise CertificateError("slice witness exceeded K^3")
    return certify(slice_set, C, budget)


def subgroup_slice_certificate(
    cert: ApproxCertificate,
    H: SubgroupHandle,
    budget: int | None = None,
) -> ApproxCertificate:
    """predicate_slice_certificate against an enumerated subgroup."""
    if H.parent != cert.aset.parent:
        raise ParentMismatch("subgroup lives elsewhere")
    members = H.elements.members
    return predicate_slice_certificate(cert, lambda c: c in members, budget)


# --------------------------------------------------------------------------
# Fibre pigeonhole
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FibreCover:
    """A inside R * (A^{-1}A ∩ H) with one representative per coset met."""

    aset: GSet
    reps: GSet
    core: GSet


def fibre_cover(A: GSet, H: SubgroupHandle, max_cosets: int, budget: int | None = None) -> FibreCover:
    """Pigeonhole A through at most max_cosets left cosets of H."""
    budget = resolve_budget(budget)
    if H.parent != A.parent:
        raise ParentMismatch("subgroup lives elsewhere")
    mul, inv = A.parent.mul, A.parent.inv
    buckets: dict[tuple, list] = {}
    for a in A.sorted_members():
        key = min(mul(a, h) for h in H.elements.members)
        buckets.setdefault(key, []).append(a)
    if len(buckets) > max_cosets:
        raise CosetCountExceeded(f"{len(buckets)} cosets met, allowed {max_cosets}")
    reps = [members[0] for members in buckets.values()]
    diff = product(inverse_set(A), A, budget)
    core = diff.intersection(H.elements)
    covered = product(GSet(A.parent, reps, _reduced=True), core, budget)
    if not A <= covered:
        raise CertificateError("fibre cover failed exact verification")
    return FibreCover(A, GSet(A.parent, reps, _reduced=True), core)


# --------------------------------------------------------------------------
# Sumset growth in abelian groups
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SumsetRow:
    m: int
    n: int
    size: int
    bound: Fraction
    within: bool


def sumset_growth_table(
    A: GSet,
    mmax: int = 4,
    nmax: int = 4,
    budget: int | None = None,
) -> tuple[Fraction, list[SumsetRow]]:
    """|mA - nA| against K^{m+n} |A| with K = |A+A|/|A|, all exact.

    Positive chains are shared and each row extends the previous by one
    difference, so the whole table costs mmax-1 + mmax*nmax products.
    """
    budget = resolve_budget(budget)
    if len(A) == 0:
        raise ValueError("empty set")
    if not A.parent.is_abelian():
        raise NotAbelian("sumset growth is an abelian statement")
    neg = inverse_set(A)
    K = doubling_constant(A, budget)
    rows = []
    pos = A
    for m in range(1, mmax + 1):
        if m > 1:
            pos = product(pos, A, budget)
        cur = pos
        for n in range(0, nmax + 1):
            if n > 0:
                cur = product(cur, neg, budget)
            if m + n < 2:
                continue
            bound = K ** (m + n) * len(A)
            rows.append(SumsetRow(m, n, len(cur), bound, len(cur) <= bound))
    return K, rows


# --------------------------------------------------------------------------
# Multiplicativity-preserving maps and image certificates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PartialMap:
    """A pointwise map from a finite set into another group."""

    domain: GSet
    codomain: object
    table: tuple  # sorted ((coords, image_coords), ...)

    @classmethod
    def from_function(cls, domain: GSet, codomain, fn) -> "PartialMap":
        rows = []
        for a in domain.elements():
            img = fn(a)
            if img.parent != codomain:
                raise ParentMismatch("image lands outside the declared codomain")
            rows.append((a.coords, img.coords))
        return cls(domain, codomain, tuple(rows))

    def mapping(self) -> dict:
        return dict(self.table)

    def apply(self, e: Element) -> Element:
        m = dict(self.table)
        if e.coords not in m:
            raise KeyError("element outside the domain of the map")
        return Element(self.codomain, m[e.coords])

    def image_set(self) -> GSet:
        return GSet(self.codomain, (img for _, img in self.table), _reduced=True)


def is_centred_triple_hom(fmap: PartialMap, budget: int | None = None) -> bool:
    """Check the centred order-3 condition by exhausting all triples.

    Equal triple products a1 a2 a3 = b1 b2 b3 must have equal image products;
    the identity must map to the identity and inverses to inverses.
    """
    budget = resolve_budget(budget)
    A = fmap.domain
    parent = A.parent
    table = fmap.mapping()
    ident = parent.identity_coords()
    if ident in table and table[ident] != fmap.codomain.identity_coords():
        return False
    inv, cinv = parent.inv, fmap.codomain.inv
    for a in A.members:
        ai = inv(a)
        if ai in table and table[ai] != cinv(table[a]):
            return False
    n = len(A)
    if n ** 3 > budget:
        raise BudgetExceeded("is_centred_triple_hom", n ** 3, budget)
    mul, cmul = parent.mul, fmap.codomain.mul
    seen: dict[tuple, tuple] = {}
    members = A.sorted_members()
    for a1 in members:
        f1 = table[a1]
        for a2 in members:
            p12 = mul(a1, a2)
            f12 = cmul(f1, table[a2])
            for a3 in members:
                p = mul(p12, a3)
                f = cmul(f12, table[a3])
                prev = seen.get(p)
                if prev is None:
                    seen[p] = f
                elif prev != f:
                    return False
    return True


def image_certificate(
    fmap: PartialMap,
    budget: int | None = None,
    check_hom: bool = True,
) -> ApproxCertificate:
    """Push a certificate through a centred order-3 map.

    The witness is re-derived greedily so it sits inside A^2, each witness
    element is split as a product of two set elements, and the images of
    those splittings witness the image set; the order-3 condition makes the
    covering identity transport.
    """
    budget = resolve_budget(budget)
    A = fmap.domain
    if check_hom and not is_centred_triple_hom(fmap, budget):
        raise CertificateError("map is not a centred order-3 homomorphism on the set")
    base = greedy_cover_certificate(A, budget)
    table = fmap.mapping()
    mul = A.parent.mul
    cmul = fmap.codomain.mul
    members = A.sorted_members()
    images = []
    for x in base.witness.sorted_members():
        split = None
        for a1 in members:
            for a2 in members:
                if mul(a1, a2) == x:
                    split = (a1, a2)
                    break
            if split:
                break
        if split is None:
            raise CertificateError("witness element is not a product of two set elements")
        images.append(cmul(table[split[0]], table[split[1]]))
    B = fmap.image_set()
    Y = GSet(fmap.codomain, images, _reduced=True)
    return certify(B, Y, budget)

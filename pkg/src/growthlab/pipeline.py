"""Step-reduction pipeline: abelianize, factor, slice, quotient, reassemble.

The driver `decompose` turns an approximate-group certificate over a
nilpotent backend into a normal subgroup H together with an ordered list of
progression and sparse pieces whose product (with H pulled to the left)
covers A·H.  Every containment along the way is re-verified exactly on the
enumerated sets; growth exponents (radii, density) are measured, never
assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .approx import ApproxCertificate, certify, predicate_slice_certificate
from .config import resolve_budget
from .covering import Meter, chang_cover, meets_translated, ruzsa_cover
from .errors import (
    BudgetExceeded,
    CertificateError,
    ContainmentError,
    ParentMismatch,
    StepDropFailed,
    StepTooLow,
)
from .groups import DirectProduct, Element, FiniteAbelian, Unitriangular
from .gset import GSet, inverse_set, power, power_chain, product
from .oracle import OracleResult, derive_sanders_cover, find_coset_progression
from .progressions import ProgressionSpec, ordered_progression
from .subgroups import (
    QuotientView,
    SubgroupHandle,
    check_normal,
    normal_closure,
    quotient_project,
    span,
    step_of_generated,
)


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by the decomposition drivers."""

    rank_max: int = 3
    budget: int | None = None
    max_power: int = 64
    c0: float = 8.0


# --------------------------------------------------------------------------
# Projections onto the abelianization


class Projection:
    """A homomorphism onto an abelian codomain with a chosen section.

    `kernel_gens` generate the kernel (as domain elements); the section is a
    set-theoretic right inverse used to lift generators, never assumed to be
    a homomorphism.
    """

    __slots__ = ("domain", "codomain", "_fn", "_section", "kernel_gens")

    def __init__(self, domain, codomain, fn, section, kernel_gens=()):
        self.domain = domain
        self.codomain = codomain
        self._fn = fn
        self._section = section
        self.kernel_gens = tuple(kernel_gens)

    def apply(self, coords) -> tuple:
        return self.codomain.reduce(self._fn(tuple(coords)))

    def image(self, A: GSet) -> GSet:
        if A.parent != self.domain:
            raise ParentMismatch("set lives outside the projection domain")
        return GSet(self.codomain, (self._fn(c) for c in A.members))

    def section_coords(self, coords) -> tuple:
        return self.domain.reduce(self._section(tuple(coords)))

    def section_element(self, coords) -> Element:
        return Element(self.domain, self.section_coords(coords))


def _unitriangular_abelianization(parent: Unitriangular) -> Projection:
    n, m = parent.n, parent.modulus
    codomain = FiniteAbelian((m,) * (n - 1))
    idx = parent.pos_index
    superdiag = tuple(idx[(i, i + 1)] for i in range(n - 1))
    arity = parent.arity

    def fn(c):
        return tuple(c[k] for k in superdiag)

    def section(w):
        out = [0] * arity
        for k, v in zip(superdiag, w):
            out[k] = v
        return tuple(out)

    kernel = []
    for k, (i, j) in enumerate(parent.positions):
        if j - i >= 2:
            coords = [0] * arity
            coords[k] = 1
            kernel.append(Element(parent, parent.reduce(tuple(coords))))
    return Projection(parent, codomain, fn, section, kernel)


def _product_abelianization(parent: DirectProduct) -> Projection:
    parts = [abelianization(f) for f in parent.factors]
    moduli: tuple[int, ...] = ()
    for p in parts:
        moduli += p.codomain.moduli
    codomain = FiniteAbelian(moduli)
    offsets = parent.offsets
    arities = tuple(f.arity for f in parent.factors)

    def fn(c):
        out: tuple[int, ...] = ()
        for p, off, ar in zip(parts, offsets, arities):
            out += p._fn(c[off:off + ar])
        return out

    def section(w):
        out: tuple[int, ...] = ()
        pos = 0
        for p in parts:
            width = p.codomain.arity
            out += p._section(w[pos:pos + width])
            pos += width
        return out

    kernel = []
    for fi, (p, off, ar) in enumerate(zip(parts, offsets, arities)):
        for g in p.kernel_gens:
            coords = list(parent.identity_coords())
            coords[off:off + ar] = list(g.coords)
            kernel.append(Element(parent, parent.reduce(tuple(coords))))
    return Projection(parent, codomain, fn, section, kernel)


def _view_abelianization(parent: QuotientView) -> Projection:
    inner = abelianization(parent.base)
    K_image = inner.image(parent.kernel.elements)
    identity = inner.codomain.identity_coords()
    if K_image.members == frozenset((identity,)):
        codomain = inner.codomain
        fn = inner._fn
    else:
        K_handle = SubgroupHandle(
            inner.codomain, K_image, is_normal=True, normal_gens=frozenset()
        )
        codomain = QuotientView(inner.codomain, K_handle)

        def fn(c, _inner=inner._fn, _q=codomain):
            return _q.reduce(_inner(c))

    def section(w, _inner=inner, _v=parent):
        return _v.reduce(_inner._section(tuple(w)))

    kernel, seen = [], set()
    for g in inner.kernel_gens:
        c = parent.reduce(g.coords)
        if c != parent.identity_coords() and c not in seen:
            seen.add(c)
            kernel.append(Element(parent, c))
    return Projection(parent, codomain, fn, section, kernel)


def abelianization(parent) -> Projection:
    """Projection of the backend onto its commutator quotient."""
    if isinstance(parent, FiniteAbelian):
        return Projection(parent, parent, lambda c: c, lambda c: c, ())
    if isinstance(parent, Unitriangular):
        return _unitriangular_abelianization(parent)
    if isinstance(parent, DirectProduct):
        return _product_abelianization(parent)
    if isinstance(parent, QuotientView):
        return _view_abelianization(parent)
    raise TypeError(f"no abelianization rule for {parent!r}")


# --------------------------------------------------------------------------
# Cyclic membership in abelian codomains


def _in_cyclic_free(moduli, x, w) -> bool:
    """Solve w = k*x coordinate-wise when some free coordinate pins k."""
    for j, m in enumerate(moduli):
        if m == 0 and x[j] != 0:
            if w[j] % x[j] != 0:
                return False
            k = w[j] // x[j]
            for t, mt in enumerate(moduli):
                if mt == 0:
                    if w[t] != k * x[t]:
                        return False
                elif (k * x[t] - w[t]) % mt != 0:
                    return False
            return True
    raise ValueError("no free pinning coordinate")


def in_cyclic(parent, x_coords, w_coords) -> bool:
    """Decide w ∈ ⟨x⟩ in an abelian parent (plain or quotient-presented)."""
    x = parent.reduce(tuple(x_coords))
    w = parent.reduce(tuple(w_coords))
    identity = parent.identity_coords()
    if w == identity:
        return True
    if x == identity:
        return False
    if isinstance(parent, QuotientView):
        base = parent.base
        return any(
            in_cyclic(base, x, base.mul(w, k))
            for k in parent.kernel.elements.members
        )
    if isinstance(parent, FiniteAbelian):
        moduli = parent.moduli
        if any(m == 0 and x[j] != 0 for j, m in enumerate(moduli)):
            return _in_cyclic_free(moduli, x, w)
        if any(m == 0 and w[j] != 0 for j, m in enumerate(moduli)):
            return False
        n = 1
        for j, m in enumerate(moduli):
            if m:
                n = math.lcm(n, m // math.gcd(x[j] % m, m))
        cur = x
        for _ in range(n):
            if cur == w:
                return True
            cur = parent.mul(cur, x)
        return False
    # generic fallback: finite-order power walk
    cur = x
    while True:
        if cur == w:
            return True
        if cur == identity:
            return False
        cur = parent.mul(cur, x)


# --------------------------------------------------------------------------
# Section maps and pullbacks through a quotient


@dataclass(frozen=True)
class SectionMap:
    """Minimal-encoding preimage choice φ: π(A) → A with verified defects."""

    quotient: QuotientView
    table: dict

    def apply(self, coords) -> tuple:
        return self.table[self.quotient.reduce(tuple(coords))]


def build_section(q: QuotientView, A: GSet, budget: int | None = None) -> SectionMap:
    """Choose φ(x) ∈ A per coset of π(A), then verify both defect bounds.

    (i) every a ∈ A satisfies a·φ(π(a))⁻¹ ∈ A² ∩ N;
    (ii) whenever x, y, xy all lie in π(A), the defect (φ(x)φ(y))⁻¹φ(xy)
    lies in A³ ∩ N.  Failures signal an implementation bug, not bad input.
    """
    budget = resolve_budget(budget)
    if A.parent != q.base:
        raise ParentMismatch("section wants a set in the base group")
    base = q.base
    table: dict[tuple, tuple] = {}
    for a in A.sorted_members():
        key = q.reduce(a)
        if key not in table:
            table[key] = a
    A2 = power(A, 2, budget)
    A3 = product(A2, A, budget)
    N = q.kernel.elements.members
    for a in A.members:
        defect = base.mul(a, base.inv(table[q.reduce(a)]))
        if defect not in A2.members or defect not in N:
            raise CertificateError("section defect (i) escaped A^2 ∩ N")
    keys = sorted(table)
    for x in keys:
        for y in keys:
            xy = q.mul(x, y)
            if xy not in table:
                continue
            fx_fy = base.mul(table[x], table[y])
            defect = base.mul(base.inv(fx_fy), table[xy])
            if defect not in A3.members or defect not in N:
                raise CertificateError("section defect (ii) escaped A^3 ∩ N")
    return SectionMap(q, table)


@dataclass(frozen=True)
class PullbackReport:
    """Exact count of A^{m+2} above a dense subset of the quotient image."""

    size: int
    lower_bound: Fraction
    m: int
    c: Fraction
    verified: bool


def pullback_check(
    q: QuotientView,
    A: GSet,
    P: GSet,
    m: int,
    c: Fraction,
    budget: int | None = None,
) -> PullbackReport:
    """Verify |π⁻¹(P) ∩ A^{m+2}| ≥ c|A| for P ⊆ π(A^m) with |P| ≥ c|π(A)|."""
    budget = resolve_budget(budget)
    if A.parent != q.base:
        raise ParentMismatch("pullback wants a set in the base group")
    c = Fraction(c)
    piAm = quotient_project(q, power(A, m, budget))
    if not P.members <= piAm.members:
        raise CertificateError("P is not inside the projected power of A")
    piA = quotient_project(q, A)
    if len(P) < c * len(piA):
        raise CertificateError("P is too sparse for the stated density")
    Am2 = power(A, m + 2, budget)
    hits = Am2.filter(lambda w: q.reduce(w) in P.members)
    bound = c * len(A)
    if len(hits) < bound:
        raise ContainmentError("pullback fell below c|A|")
    return PullbackReport(len(hits), bound, m, c, True)


# --------------------------------------------------------------------------
# Abelian factorization (literal high-power fibres over the oracle hit)


@dataclass(frozen=True)
class Factorization:
    """Fibres of A¹⁸/A²⁴ over the oracle's coset progression."""

    H_part: GSet
    cyclic_parts: tuple[GSet, ...]
    product_size: int | None
    density: Fraction | None
    oracle: OracleResult
    projection: Projection
    step: int

    @property
    def r(self) -> int:
        return len(self.cyclic_parts)


def abelian_factorization(
    cert: ApproxCertificate,
    rank_max: int = 3,
    budget: int | None = None,
    with_product: bool = True,
) -> Factorization:
    """Split A into a subgroup fibre and cyclic fibres over its image.

    Runs the abelian oracle on the commutator-quotient image of A, then
    takes H_part = A¹⁸ ∩ π⁻¹(H) and one A²⁴ ∩ π⁻¹(⟨x_i⟩) per progression
    generator.  With `with_product` the exact product of the parts and its
    density against |A| are recorded (skip on infinite backends, where the
    product blows the pair budget while the fibres themselves stay finite).
    """
    budget = resolve_budget(budget)
    A = cert.aset
    elems = list(A.elements())
    step = step_of_generated(elems, budget)
    if step < 2:
        raise StepTooLow(f"factorization needs step >= 2, got {step}")
    proj = abelianization(A.parent)
    Abar = proj.image(A)
    res = find_coset_progression(Abar, rank_max=rank_max, budget=budget)
    chain = power_chain(A, 24, budget)
    A18, A24 = chain[17], chain[23]
    H_members = res.best.H.elements.members
    H_part = A18.filter(lambda c: proj.apply(c) in H_members)
    parts = []
    for x in res.best.generators:
        parts.append(
            A24.filter(lambda c, _x=x.coords: in_cyclic(proj.codomain, _x, proj.apply(c)))
        )
    product_size = density = None
    if with_product:
        prod = H_part
        for part in parts:
            prod = product(prod, part, budget)
        product_size = len(prod)
        density = Fraction(product_size, len(A))
    return Factorization(H_part, tuple(parts), product_size, density, res, proj, step)


# --------------------------------------------------------------------------
# Step reduction


@dataclass(frozen=True)
class StepReduction:
    """One rung down the nilpotency ladder for Ã ⊆ A^m."""

    N: SubgroupHandle
    N_radius: int
    r: int
    factors: tuple[ApproxCertificate, ...]
    step_drop_verified: bool
    step_in: int
    factorization: Factorization | None
    reduced_parent: object | None  # None: factors already live low enough
    product_size: int

    @property
    def quotient_kernel(self) -> SubgroupHandle | None:
        if isinstance(self.reduced_parent, QuotientView):
            return self.reduced_parent.kernel
        return None


def _left_normed_levels(gens: list[Element], depth: int, parent) -> list[set]:
    """Deduplicated levels of left-normed commutators [g1,...,gt]."""
    identity = parent.identity_coords()
    mul, inv = parent.mul, parent.inv
    base = {g.coords for g in gens if g.coords != identity}
    levels = [base]
    for _ in range(depth - 1):
        nxt = set()
        for c in levels[-1]:
            ci = inv(c)
            for g in base:
                comm = mul(mul(ci, inv(g)), mul(c, g))
                if comm != identity:
                    nxt.add(comm)
        levels.append(nxt)
    return levels


def containment_radius(
    S: GSet, A: GSet, budget: int | None = None, max_power: int = 64
) -> int:
    """Least k with S ⊆ A^k (A⁰ = {1}); errors if S escapes ⟨A⟩."""
    budget = resolve_budget(budget)
    if S.parent != A.parent:
        raise ParentMismatch("radius needs a common parent")
    identity = A.parent.identity_coords()
    if S.members == frozenset((identity,)):
        return 0
    cur = A
    for k in range(1, max_power + 1):
        if S.members <= cur.members:
            return k
        nxt = product(cur, A, budget)
        if nxt.members == cur.members:
            raise ContainmentError("set escapes the group generated by A")
        cur = nxt
    raise BudgetExceeded("containment_radius", max_power + 1, max_power)


def word_radius_bound(
    spec: ProgressionSpec, A: GSet, budget: int | None = None, max_power: int = 64
) -> int:
    """Certified exponent k with the realized progression inside A^k.

    Measures each generator's radius exactly (generators are short words,
    so those balls stay small) and composes them: every realized element is
    an ordered product of at most ``bound_i`` copies of g_i^{±1}, hence lies
    in A to the sum of radius·bound.  An upper bound rather than the minimum:
    on infinite backends the minimal exponent can sit behind balls of
    millions of elements, while this bound costs a few tiny walks.
    """
    budget = resolve_budget(budget)
    pending = {i: g.coords for i, g in enumerate(spec.generators)}
    radii: dict[int, int] = {}
    identity = A.parent.identity_coords()
    for i, c in list(pending.items()):
        if c == identity:
            radii[i] = 0
            del pending[i]
    cur = A
    for k in range(1, max_power + 1):
        for i in [i for i, c in pending.items() if c in cur.members]:
            radii[i] = k
            del pending[i]
        if not pending:
            break
        nxt = product(cur, A, budget)
        if nxt.members == cur.members:
            raise ContainmentError("a generator escapes the group generated by A")
        cur = nxt
    if pending:
        raise BudgetExceeded("word_radius_bound", max_power + 1, max_power)
    return sum(radii[i] * b for i, b in enumerate(spec.bounds))


def normal_closure_radius(
    H: SubgroupHandle,
    cert: ApproxCertificate,
    budget: int | None = None,
    max_power: int = 64,
) -> tuple[SubgroupHandle, int]:
    """Normal closure of H under conjugation by A, with its measured radius."""
    budget = resolve_budget(budget)
    A = cert.aset
    parent = A.parent
    if H.parent != parent:
        raise ParentMismatch("subgroup lives elsewhere")
    if parent.is_finite() and parent.order() is not None:
        generated = span(list(A.elements()), budget)
        if generated.order() != parent.order():
            raise ValueError("A does not generate the (finite) backend")
    N = normal_closure(H, list(A.elements()), budget)
    radius = 0 if N.is_trivial() else containment_radius(N.elements, A, budget, max_power)
    return N, radius


def _project_certificate(view, cert: ApproxCertificate, budget: int) -> ApproxCertificate:
    """Certificate for the image of a certified set under a quotient."""
    return certify(
        quotient_project(view, cert.aset),
        quotient_project(view, cert.witness),
        budget,
    )


def step_reduction(
    cert: ApproxCertificate,
    ambient: ApproxCertificate,
    m: int,
    rank_max: int = 3,
    budget: int | None = None,
) -> StepReduction:
    """Split Ã ⊆ A^m into slice factors whose images drop in step.

    The factorization's fibre data selects the slices A_0 = Ã² ∩ π⁻¹(H) and
    A_i = Ã² ∩ π⁻¹(⟨x_i⟩); N is the normal closure (under A) of the s̃-fold
    left-normed commutators of generators of π⁻¹(H); each factor's image in
    the quotient by N is verified to generate a group of strictly smaller
    step.  Abelian input degenerates to a single factor Ã with N trivial.
    """
    budget = resolve_budget(budget)
    A_t = cert.aset
    parent = A_t.parent
    amb_parent = ambient.aset.parent
    is_view = isinstance(parent, QuotientView)
    if is_view:
        if parent.base != amb_parent:
            raise ParentMismatch("quotient does not sit over the ambient group")
        shadow = quotient_project(parent, power(ambient.aset, m, budget))
    elif parent == amb_parent:
        shadow = power(ambient.aset, m, budget)
    else:
        raise ParentMismatch("certificate lives outside the ambient group")
    if not A_t.members <= shadow.members:
        raise ContainmentError("the set is not inside the declared power of A")

    step = step_of_generated(list(A_t.elements()), budget)
    trivial_N = SubgroupHandle(
        parent, GSet.identity_set(parent), (), True, frozenset()
    )
    if step <= 1:
        return StepReduction(
            trivial_N, 0, 1, (cert,), True, step, None, None, len(A_t)
        )

    fac = abelian_factorization(
        cert, rank_max=rank_max, budget=budget,
        with_product=parent.is_finite(),
    )
    proj = fac.projection
    H_members = fac.oracle.best.H.elements.members
    factors = [
        predicate_slice_certificate(cert, lambda c: proj.apply(c) in H_members, budget)
    ]
    for x in fac.oracle.best.generators:
        factors.append(
            predicate_slice_certificate(
                cert,
                lambda c, _x=x.coords: in_cyclic(proj.codomain, _x, proj.apply(c)),
                budget,
            )
        )

    lifted = [proj.section_element(h.coords) for h in fac.oracle.best.H.gen_elements()]
    g0_gens = lifted + [Element(parent, g.coords) for g in proj.kernel_gens]
    levels = _left_normed_levels(g0_gens, step, parent)
    gamma = levels[-1]
    amb_elems = list(ambient.aset.elements())
    if not gamma:
        N = trivial_N
        N_radius = 0
        reduced_parent = None
        reduced_sets = [f.aset for f in factors]
    else:
        conj = (
            [e for e in quotient_project(parent, ambient.aset).elements()]
            if is_view else amb_elems
        )
        N = normal_closure([Element(parent, c) for c in gamma], conj, budget)
        N_radius = containment_radius(
            N.elements,
            quotient_project(parent, ambient.aset) if is_view else ambient.aset,
            budget,
        )
        if is_view:
            seed = [Element(amb_parent, c) for c in N.elements.members]
            seed += parent.kernel.gen_elements()
            N_flat = normal_closure(seed, amb_elems, budget)
            reduced_parent = QuotientView(amb_parent, N_flat)
        else:
            reduced_parent = QuotientView(amb_parent, N)
        reduced_sets = [quotient_project(reduced_parent, f.aset) for f in factors]

    for k, S in enumerate(reduced_sets):
        dropped = step_of_generated(list(S.elements()), budget)
        if dropped >= step:
            raise StepDropFailed(
                f"factor {k} kept step {dropped} (input step {step})"
            )

    prod = factors[0].aset
    for f in factors[1:]:
        prod = product(prod, f.aset, budget)
    return StepReduction(
        N, N_radius, len(factors) - 1, tuple(factors), True, step,
        fac, reduced_parent, len(prod),
    )


# --------------------------------------------------------------------------
# Full decomposition


@dataclass(frozen=True)
class Piece:
    """One factor of the covering product, in base-group coordinates."""

    kind: str  # "progression" | "sparse"
    members: GSet
    spec: ProgressionSpec | None = None
    chosen: Element | None = None
    q_members: GSet | None = None


@dataclass(frozen=True)
class Decomposition:
    """A·H ⊆ H·(ordered product of pieces), with measured exponents."""

    H: SubgroupHandle
    pieces: tuple[Piece, ...]
    xi: tuple[int, ...]
    P_ord_final: ProgressionSpec | None
    P_realized: GSet
    step: int
    size_A: int
    K_upper: int
    radius_H: int
    radius_P: int
    rank_final: int
    delta: Fraction
    logs: tuple[str, ...]

    def to_report(self) -> dict:
        return {
            "step": self.step,
            "size_A": self.size_A,
            "K_upper": self.K_upper,
            "size_H": self.H.order(),
            "radius_H": self.radius_H,
            "rank_final": self.rank_final,
            "radius_P": self.radius_P,
            "delta": str(self.delta),
            "xi": list(self.xi),
            "logs": list(self.logs),
        }


def _base_elements(base, coords_iter) -> list[Element]:
    return [Element(base, c) for c in coords_iter]


def _expand(
    cert: ApproxCertificate,
    ambient: ApproxCertificate,
    m: int,
    config: PipelineConfig,
    budget: int,
    logs: list[str],
    depth: int,
) -> tuple[list[SubgroupHandle], list[Piece]]:
    """Recursive cover: sparse + progression pieces plus normal contributions."""
    parent = cert.aset.parent
    is_view = isinstance(parent, QuotientView)
    base = parent.base if is_view else parent
    step = step_of_generated(list(cert.aset.elements()), budget)

    if step <= 1:
        res = find_coset_progression(cert.aset, rank_max=config.rank_max, budget=budget)
        sc = derive_sanders_cover(cert.aset, res, budget)
        logs.append(
            f"depth {depth}: base case |A~|={len(cert.aset)} rank={res.best.rank} "
            f"|H~|={res.best.H.order()} |X|={len(sc.X)}"
        )
        seeds = _base_elements(base, res.best.H.elements.members)
        if is_view:
            seeds += parent.kernel.gen_elements()
        seeds = [e for e in seeds if e.coords != base.identity_coords()]
        normals = []
        if seeds:
            normals.append(
                normal_closure(seeds, list(ambient.aset.elements()), budget)
            )
        pieces = [Piece("sparse", GSet(base, sc.X.members))]
        if res.best.rank:
            spec2 = res.best.spec().scaled(2)
            gens_b = tuple(Element(base, g.coords) for g in spec2.generators)
            spec_b = ProgressionSpec(gens_b, spec2.bounds)
            pieces.append(
                Piece("progression", ordered_progression(spec_b, budget), spec_b)
            )
        return normals, pieces

    red = step_reduction(cert, ambient, m, rank_max=config.rank_max, budget=budget)
    B = red.factors[0].aset
    for f in red.factors[1:]:
        B = product(B, f.aset, budget)
    rc = ruzsa_cover(cert.aset, B, budget)
    logs.append(
        f"depth {depth}: step {red.step_in} -> r={red.r} |N|={red.N.order()} "
        f"N_radius={red.N_radius} |B|={len(B)} |X_top|={len(rc.X)}"
    )
    normals: list[SubgroupHandle] = []
    if red.reduced_parent is not None:
        normals.append(red.reduced_parent.kernel)
        sub_certs = [
            _project_certificate(red.reduced_parent, f, budget) for f in red.factors
        ]
    else:
        sub_certs = list(red.factors)
    pieces: list[Piece] = [Piece("sparse", GSet(base, rc.X.members))]
    factor_pieces: list[list[Piece]] = []
    for f in sub_certs:
        sub_normals, sub_pieces = _expand(
            f, ambient, 2 * m, config, budget, logs, depth + 1
        )
        normals.extend(sub_normals)
        factor_pieces.append(sub_pieces)
    for plist in factor_pieces:
        pieces.extend(plist)
    for plist in reversed(factor_pieces):
        pieces.extend(plist)
    return normals, pieces


def _chain_product(start: GSet, sets, budget: int) -> GSet:
    out = start
    for S in sets:
        out = product(out, S, budget)
    return out


def _pigeonhole(
    H_set: GSet, pieces: list[Piece], budget: int
) -> list[Piece]:
    """Greedy exact choice of u_i per sparse piece, left to right.

    Chosen positions contribute their singleton; positions not yet decided
    contribute their full set, so each maximization is a union-bound step
    and |H·∏(chosen)| never falls under |H·∏(full)| / ∏|X_i|.
    """
    final: list[Piece] = []
    left = H_set
    base = H_set.parent
    for i, piece in enumerate(pieces):
        if piece.kind == "progression":
            final.append(piece)
            left = product(left, piece.members, budget)
            continue
        candidates = piece.members.sorted_members()
        if len(candidates) == 1:
            best = candidates[0]
        else:
            suffix = [p.members for p in pieces[i + 1:]]
            best, best_score = None, -1
            for u in candidates:
                u_set = GSet(base, [u], _reduced=True)
                score = len(_chain_product(product(left, u_set, budget), suffix, budget))
                if score > best_score:
                    best, best_score = u, score
        u_el = Element(base, best)
        q_set = GSet(base, [best, base.identity_coords(), base.inv(best)], _reduced=True)
        final.append(replace(piece, chosen=u_el, q_members=q_set))
        left = product(left, GSet(base, [best], _reduced=True), budget)
    return final


def decompose(cert: ApproxCertificate, config: PipelineConfig | None = None) -> Decomposition:
    """Cover A·H by H times an ordered product of progression/sparse pieces.

    Recursion on the step: step reduction splits the set into slice factors,
    a Ruzsa cover re-expresses the set through their product, and abelian
    base cases emit a sparse cover plus a doubled coset progression.  H is
    the joint span of every normal contribution, re-verified normal under
    conjugation by A, and the final containment A·H ⊆ H·∏pieces is checked
    exactly in the base group.  Density δ = |H·P_ord| / |A·H| is measured
    and recorded (only positivity is asserted).
    """
    config = config or PipelineConfig()
    budget = resolve_budget(config.budget)
    A = cert.aset
    parent = A.parent
    if isinstance(parent, QuotientView):
        raise ValueError("decompose expects a set in a base backend")
    logs: list[str] = []
    step = step_of_generated(list(A.elements()), budget)

    if cert.K_lower < 2:
        H = span(list(A.elements()), budget)
        H = check_normal(H, list(A.elements()), budget)
        AH = product(A, H.elements, budget)
        if not AH.members <= H.elements.members:
            raise ContainmentError("span of A failed to absorb A·H")
        logs.append(f"small doubling {cert.K_lower}: H = <A>, |H|={H.order()}")
        radius_H = containment_radius(H.elements, A, budget, config.max_power)
        return Decomposition(
            H, (), (), None, GSet.identity_set(parent), step, len(A),
            cert.K_upper, radius_H, 0, 0, Fraction(1), tuple(logs),
        )

    normals, raw_pieces = _expand(cert, cert, 1, config, budget, logs, 0)
    gen_pool: list[Element] = []
    for N in normals:
        if not N.is_trivial():
            gen_pool.extend(N.gen_elements())
    if gen_pool:
        H = span(gen_pool, budget)
    else:
        H = SubgroupHandle(parent, GSet.identity_set(parent), (), True, frozenset())
    H = check_normal(H, list(A.elements()), budget)
    if H.is_normal is not True:
        raise ContainmentError("assembled H is not normalised by A")

    covered = _chain_product(H.elements, (p.members for p in raw_pieces), budget)
    AH = product(A, H.elements, budget)
    if not AH.members <= covered.members:
        raise ContainmentError("H·(product of pieces) missed part of A·H")

    pieces = _pigeonhole(H.elements, raw_pieces, budget)
    gens: list[Element] = []
    bounds: list[int] = []
    for p in pieces:
        if p.kind == "progression":
            gens.extend(p.spec.generators)
            bounds.extend(p.spec.bounds)
        else:
            gens.append(p.chosen)
            bounds.append(1)
    P_spec = ProgressionSpec(tuple(gens), tuple(bounds))
    P_realized = ordered_progression(P_spec, budget)
    HP = product(H.elements, P_realized, budget)
    delta = Fraction(len(HP), len(AH))
    if delta <= 0:
        raise ContainmentError("density collapsed to zero")

    prog_pos = [i for i, p in enumerate(pieces) if p.kind == "progression"]
    sparse_pos = [i for i, p in enumerate(pieces) if p.kind == "sparse"]
    xi = tuple(prog_pos + sparse_pos)
    radius_H = (
        0 if H.is_trivial()
        else containment_radius(H.elements, A, budget, config.max_power)
    )
    if parent.is_finite():
        radius_P = containment_radius(P_realized, A, budget, config.max_power)
        radius_note = "minimal"
    else:
        # Minimal exponents on infinite backends can hide behind balls of
        # millions of elements; report the certified word-length bound.
        radius_P = word_radius_bound(P_spec, A, budget, config.max_power)
        radius_note = "word-length bound"
    logs.append(
        f"final: |H|={H.order()} pieces={len(pieces)} rank={P_spec.rank} "
        f"delta={delta} radius_P={radius_P} ({radius_note})"
    )
    return Decomposition(
        H, tuple(pieces), xi, P_spec, P_realized, step, len(A), cert.K_upper,
        radius_H, radius_P, P_spec.rank, delta, tuple(logs),
    )


# --------------------------------------------------------------------------
# Covers derived from a decomposition


@dataclass(frozen=True)
class RuzsaBranchReport:
    """A ⊆ X·H·P·P⁻¹ with X lifted from the quotient by H."""

    X: GSet
    ratio_bound: int
    rank: int
    verified: bool


@dataclass(frozen=True)
class ChangBranchReport:
    """A ⊆ (realized progression product)·H via a Chang tower over π(P)."""

    t: int
    stage_sizes: tuple[int, ...]
    rank: int
    verified: bool


def _verify_sandwich_cover(
    A: GSet,
    X: GSet,
    H: SubgroupHandle,
    P: GSet,
    budget: int,
    label: str,
) -> None:
    """Exact check A ⊆ X·H·P·P⁻¹ without materialising P·P⁻¹.

    Membership is decided per element through the witness equivalence
    a ∈ x·h·P·P⁻¹  ⇔  ((x·h)⁻¹ a)·P ∩ P ≠ ∅; the scan over P exits on the
    first witness and is metered against the budget.
    """
    parent = A.parent
    est = len(X) * len(H.elements) * len(P)
    if est <= budget and est * len(P) <= budget:
        covered = _chain_product(X, [H.elements, P, inverse_set(P)], budget)
        if not A.members <= covered.members:
            raise ContainmentError(f"{label} missed part of A")
        return
    mul, inv = parent.mul, parent.inv
    meter = Meter(f"{label} verification", budget)
    members = P.members
    for a in A.sorted_members():
        if not any(
            meets_translated(parent, mul(inv(mul(x, h)), a), members, meter)
            for x in X.sorted_members()
            for h in H.elements.members
        ):
            raise ContainmentError(f"{label} missed part of A")


def corollary_covers(
    dec: Decomposition,
    cert: ApproxCertificate,
    which: str,
    budget: int | None = None,
    c0: float = 8.0,
):
    """Convert a decomposition into one of the two global cover formats."""
    budget = resolve_budget(budget)
    A = cert.aset
    parent = A.parent
    P = dec.P_realized
    # A trivial H makes the quotient a copy of the base; skip the view and
    # its per-element reduction cache.
    trivial = dec.H.is_trivial()
    if not trivial:
        q = QuotientView(parent, dec.H)
        Abar = quotient_project(q, A)

    if which == "ruzsa":
        if trivial:
            rc = ruzsa_cover(A, P, budget)
            X = rc.X
        else:
            Pbar = quotient_project(q, P)
            rc = ruzsa_cover(Abar, Pbar, budget)
            lift = [
                min(c for c in A.sorted_members() if q.reduce(c) == x)
                for x in rc.X.sorted_members()
            ]
            X = GSet(parent, lift, _reduced=True)
        _verify_sandwich_cover(A, X, dec.H, P, budget, "X·H·P·P⁻¹")
        rank = 2 * (dec.P_ord_final.rank if dec.P_ord_final else 0)
        return RuzsaBranchReport(X, rc.ratio_bound, rank, True)

    if which == "chang":
        if trivial:
            cert_q = cert
            Bbar = P
        else:
            cert_q = certify(Abar, quotient_project(q, cert.witness), budget)
            Bbar = quotient_project(q, P)
        # P sits in A^radius_P by the decomposition's certified exponent, and
        # projection preserves the containment, so the power precondition is
        # already established.
        m = max(1, dec.radius_P)
        cc = chang_cover(cert_q, Bbar, m, c0, budget, assume_in_power=True)
        stage_lifts = [
            GSet(parent, S.sorted_members(), _reduced=True) for S in cc.stages
        ]
        # The tower certifies A ⊆ S_t·T·T⁻¹·H with T = S_{t-1}···S_1·B; every
        # witness product rearranges into the ordered form
        # Q_t ··· Q_1 · P · P⁻¹ · Q_1 ··· Q_{t-1} · H where Q_i realizes the
        # stage elements as a bounds-1 progression factor, so verifying the
        # tower in the base group verifies the arranged cover exactly.
        T = P
        for S in stage_lifts[:-1]:
            T = product(S, T, budget)
        _verify_sandwich_cover(A, stage_lifts[-1], dec.H, T, budget, "(realized P)·H")
        rank = 2 * (dec.P_ord_final.rank if dec.P_ord_final else 0)
        rank += sum(len(S) for S in cc.stages)
        return ChangBranchReport(cc.t, tuple(len(S) for S in cc.stages), rank, True)

    raise ValueError(f"unknown cover branch {which!r}")

"""Constructive covering lemmas with exact postcondition checks.

Both covers follow the same greedy core: scan candidates in canonical order
and keep those whose translates stay pairwise disjoint.  Maximality of the
kept family converts directly into a covering statement, which is then
re-verified by exact product computation rather than trusted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .config import resolve_budget
from .errors import BudgetExceeded, CertificateError, ParentMismatch
from .approx import ApproxCertificate
from .gset import GSet, inverse_set, power, product


class Meter:
    """Budget accounting for streaming scans that never materialise a set."""

    __slots__ = ("op", "budget", "used")

    def __init__(self, op: str, budget: int) -> None:
        self.op = op
        self.budget = budget
        self.used = 0

    def spend(self, n: int) -> None:
        self.used += n
        if self.used > self.budget:
            raise BudgetExceeded(self.op, self.used, self.budget)


def meets_translated(parent, t: tuple, S: frozenset, meter: Meter | None = None) -> bool:
    """Exact test t·S ∩ S ≠ ∅ by scanning S with early exit.

    Equivalent to membership t ∈ S·S^{-1} without materialising the
    difference set, which is quadratic in |S|.
    """
    mul = parent.mul
    spent = 0
    for s in S:
        spent += 1
        if mul(t, s) in S:
            if meter is not None:
                meter.spend(spent)
            return True
    if meter is not None:
        meter.spend(spent)
    return False


def verify_translate_cover(A: GSet, X: GSet, B: GSet, budget: int, op: str) -> None:
    """Exact check A ⊆ X·B·B^{-1}; raises CertificateError when it fails.

    Small instances are checked by materialising the cover product.  When
    that product would exceed the budget, the same containment is decided
    element by element trough the witness equivalence
    a ∈ x·B·B^{-1}  ⇔  (x^{-1}a)·B ∩ B ≠ ∅, scanning B with early exit.
    """
    est = len(X) * len(B)
    if est <= budget and est * len(B) <= budget:
        covered = product(product(X, B, budget), inverse_set(B), budget)
        if not A <= covered:
            raise CertificateError("cover failed exact verification")
        return
    parent = A.parent
    mul, inv = parent.mul, parent.inv
    members = B.members
    meter = Meter(op, budget)
    x_order = X.sorted_members()
    for a in A.sorted_members():
        # A kept element covers itself, so try it first when present.
        cands = [a] + [x for x in x_order if x != a] if a in X.members else x_order
        if not any(meets_translated(parent, mul(inv(x), a), members, meter) for x in cands):
            raise CertificateError("cover failed exact verification")


def _disjoint_translates(A: GSet, B: GSet, keep_at_most: int | None = None) -> list[tuple]:
    """Greedy maximal subset of A whose left-translates of B are pairwise disjoint."""
    mul = A.parent.mul
    kept = []
    occupied: set = set()
    for a in A.sorted_members():
        aB = [mul(a, b) for b in B.members]
        if any(w in occupied for w in aB):
            continue
        kept.append(a)
        occupied.update(aB)
        if keep_at_most is not None and len(kept) >= keep_at_most:
            break
    return kept


@dataclass(frozen=True)
class RuzsaCover:
    """X ⊆ A with pairwise disjoint translates of B and A ⊆ X B B^{-1}."""

    X: GSet
    ratio_bound: int
    product_size: int
    verified: bool = True


def ruzsa_cover(A: GSet, B: GSet, budget: int | None = None) -> RuzsaCover:
    """Greedy disjoint-translate cover: A inside X*B*B^{-1} with |X| <= ceil(|AB|/|B|)."""
    budget = resolve_budget(budget)
    if A.parent != B.parent:
        raise ParentMismatch("cover needs a common parent")
    if len(A) == 0 or len(B) == 0:
        raise ValueError("cover of/by the empty set")
    kept = _disjoint_translates(A, B)
    X = GSet(A.parent, kept, _reduced=True)
    AB = product(A, B, budget)
    ratio_bound = -(-len(AB) // len(B))
    if len(X) > ratio_bound:
        raise CertificateError("disjoint family exceeds |AB|/|B|; scan is broken")
    verify_translate_cover(A, X, B, budget, "ruzsa cover verification")
    return RuzsaCover(X, ratio_bound, len(AB))


@dataclass(frozen=True)
class ChangCover:
    """Iterated-hull cover: stages S_1..S_t with the final hull T_t.

    Non-terminal stages are truncated to exactly 2K disjoint translates so
    each hull is exactly 2K times larger, forcing termination in
    logarithmically many stages; the terminal stage is a maximal family and
    certifies A ⊆ S_t T_t T_t^{-1}.
    """

    stages: tuple[GSet, ...]
    hull_sizes: tuple[int, ...]
    final_hull: GSet
    C: Fraction
    t_bound: int
    arrangement: str
    verified: bool = True

    @property
    def t(self) -> int:
        return len(self.stages)

    @property
    def stage_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.stages)


def chang_t_bound(C: Fraction, m: int, K: int, c0: float = 8.0) -> int:
    """Stage-count guarantee ceil(c0 * (log C + m log K + 1)), natural logs."""
    val = c0 * (math.log(C) + m * math.log(K) + 1.0)
    return max(1, math.ceil(val))


def chang_cover(
    cert: ApproxCertificate,
    B: GSet,
    m: int,
    c0: float = 8.0,
    budget: int | None = None,
    assume_in_power: bool = False,
) -> ChangCover:
    """Cover A by a bounded tower of disjoint-translate hulls over B ⊆ A^m.

    ``assume_in_power`` skips the enumeration check of B ⊆ A^m; pass it only
    when the containment is already certified by construction (for example a
    progression whose generators carry measured word-length exponents), since
    enumerating A^m may be far beyond any budget while the certificate is
    exact.
    """
    budget = resolve_budget(budget)
    A = cert.aset
    if A.parent != B.parent:
        raise ParentMismatch("cover needs a common parent")
    if len(B) == 0:
        raise ValueError("cover by the empty set")
    if not assume_in_power and not B <= power(A, m, budget):
        raise CertificateError("B is not inside the declared power of A")
    K = cert.K_upper
    C = Fraction(len(A), len(B))
    t_bound = chang_t_bound(C, m, K, c0)
    cap = 2 * K
    stages: list[GSet] = []
    hull_sizes: list[int] = []
    T = B
    while True:
        hull_sizes.append(len(T))
        kept = _disjoint_translates(A, T)
        if len(kept) <= cap:
            S = GSet(A.parent, kept, _reduced=True)
            stages.append(S)
            break
        S = GSet(A.parent, kept[:cap], _reduced=True)
        stages.append(S)
        T = product(S, T, budget)
        if len(T) != cap * hull_sizes[-1]:
            raise CertificateError("hull growth lost disjointness; scan is broken")
    if len(stages) > t_bound:
        raise CertificateError(
            f"stage count {len(stages)} exceeded its guarantee ({t_bound}); this indicates a bug"
        )
    verify_translate_cover(A, stages[-1], T, budget, "chang cover verification")
    return ChangCover(
        stages=tuple(stages),
        hull_sizes=tuple(hull_sizes),
        final_hull=T,
        C=C,
        t_bound=t_bound,
        arrangement="A <= S_t . T_t . T_t^-1 with T_t = S_{t-1} ... S_1 . B",
    )

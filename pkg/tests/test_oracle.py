"""Coset-progression search in abelian difference bodies, plus the
derived Sanders-style cover with its Plünnecke size bound."""
from fractions import Fraction

import pytest

from growthlab import (
    CertificateError,
    CosetProgression,
    Element,
    FiniteAbelian,
    GSet,
    NotAbelian,
    derive_sanders_cover,
    difference_body,
    find_coset_progression,
    greedy_cover_certificate,
    power,
    span,
)
from growthlab.recipes import generate_example


def test_interval_oracle_frozen():
    A = generate_example("interval ab:101 L=10")
    res = find_coset_progression(A, rank_max=2)
    assert res.best.rank == 1
    assert res.best.H.order() == 1
    assert len(res.best.realized) == 81
    assert res.density == Fraction(27, 7)  # 81/21
    assert res.body_size == 81
    D = difference_body(A)
    assert res.best.realized <= D
    assert D == power(A, 4)  # symmetric input: 2A-2A is the fourth power


def test_coset_union_oracle_finds_subgroup():
    A = generate_example("coset-union ab:12,12 sub=4,0|0,4 reps=1,0|0,1")
    res = find_coset_progression(A, rank_max=2)
    # the difference body of the 45-element union spans everything, and the
    # tie-break prefers the larger subgroup part: the whole group, rank 0
    assert res.best.H.order() == 144
    assert res.best.rank == 0
    assert res.density == Fraction(16, 5)
    assert res.best.realized <= difference_body(A)


def test_realized_set_is_reverified():
    parent = FiniteAbelian((12,))
    H = span([Element(parent, (4,))])
    wrong = GSet(parent, [(0,), (1,)], _reduced=True)
    with pytest.raises(CertificateError):
        CosetProgression(H, (Element(parent, (1,)),), (1,), wrong)


def test_oracle_requires_commuting_members():
    ball = generate_example("ball ut:3:5 radius=1")
    with pytest.raises(NotAbelian):
        find_coset_progression(ball, rank_max=1)


def test_sanders_cover_bound():
    A = generate_example("random-symmetric ab:101 size=15 seed=21")
    cert = greedy_cover_certificate(A)
    res = find_coset_progression(A, rank_max=2)
    sc = derive_sanders_cover(A, res)
    assert len(sc.doubled) <= Fraction(cert.K_upper) ** 8 * len(A)
    assert sc.ratio >= 1
    # the doubled progression really covers A through X
    hull = _translate_hull(sc.X, sc.doubled)
    assert A <= hull


def _translate_hull(X, body):
    from growthlab import product

    return product(X, body)


def test_oracle_determinism():
    A = generate_example("random-symmetric ab:61 size=13 seed=12")
    r1 = find_coset_progression(A, rank_max=2)
    r2 = find_coset_progression(A, rank_max=2)
    assert r1.best.generators == r2.best.generators
    assert r1.best.bounds == r2.best.bounds
    assert r1.density == r2.density

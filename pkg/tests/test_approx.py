"""Certificates, growth law, slicing, sumset tables, and mapped images."""
from fractions import Fraction

import pytest

from growthlab import (
    BudgetExceeded,
    CertificateError,
    Element,
    FiniteAbelian,
    GSet,
    NotAbelian,
    PartialMap,
    certify,
    doubling_constant,
    fibre_cover,
    greedy_cover_certificate,
    growth_law,
    heisenberg,
    image_certificate,
    is_centred_triple_hom,
    predicate_slice_certificate,
    slicing_cover,
    span,
    subgroup_slice_certificate,
    sumset_growth_table,
    symmetrize,
)
from growthlab.recipes import generate_example

Z101 = FiniteAbelian((101,))


def _interval(L, n=101):
    parent = FiniteAbelian((n,))
    return GSet(parent, [parent.reduce((c,)) for c in range(-L, L + 1)], _reduced=True)


def test_interval_is_two_approximate():
    A = _interval(10)
    X = GSet(Z101, [(91,), (10,)], _reduced=True)  # -10 and +10
    cert = certify(A, X)
    assert cert.K_upper == 2
    assert cert.K_lower == Fraction(41, 21)
    assert doubling_constant(A) == Fraction(41, 21)


def test_certify_rejects_bad_witness():
    A = _interval(10)
    with pytest.raises(CertificateError):
        certify(A, GSet(Z101, [(0,)], _reduced=True))
    with pytest.raises(CertificateError):
        # asymmetric input is not certifiable
        certify(
            GSet(Z101, [(0,), (1,)], _reduced=True),
            GSet(Z101, [(0,), (1,)], _reduced=True),
        )


def test_greedy_certificate_and_growth_law():
    A = generate_example("random-symmetric ab:101 size=21 seed=7")
    cert = greedy_cover_certificate(A)
    assert cert.K_upper == 8
    assert cert.K_lower == Fraction(13, 3)
    assert cert.witness <= _pow(A, 2)
    rows = growth_law(cert, 5)
    assert [r.power for r in rows] == [1, 2, 3, 4, 5]
    for r in rows:
        assert r.within and r.size <= r.bound
        assert r.bound == cert.K_upper ** (r.power - 1) * len(A)


def test_slicing_cover_bound():
    A = generate_example("random-symmetric ab:101 size=21 seed=7")
    B = generate_example("random-symmetric ab:101 size=9 seed=8")
    ca, cb = greedy_cover_certificate(A), greedy_cover_certificate(B)
    sc = slicing_cover(ca, cb, 2, 2)
    assert sc.count <= sc.bound == ca.K_upper ** 1 * cb.K_upper ** 1
    sc32 = slicing_cover(ca, cb, 3, 2)
    assert sc32.count <= sc32.bound == ca.K_upper ** 2 * cb.K_upper ** 1


def test_predicate_and_subgroup_slices():
    parent = FiniteAbelian((12, 12))
    A = symmetrize(
        GSet(parent, [(1, 0), (0, 1), (4, 0), (0, 4)], _reduced=True)
    )
    cert = greedy_cover_certificate(A)
    H = span([Element(parent, (4, 0)), Element(parent, (0, 4))])
    sliced = subgroup_slice_certificate(cert, H)
    assert sliced.aset <= _pow(A, 2)
    assert all(c in H for c in sliced.aset.elements())
    assert sliced.K_upper <= cert.K_upper ** 3
    pred = predicate_slice_certificate(cert, lambda c: c in H.elements.members)
    assert pred.aset == sliced.aset


def test_fibre_cover_pigeonhole():
    parent = FiniteAbelian((12, 12))
    A = symmetrize(GSet(parent, [(1, 0), (0, 1), (4, 2)], _reduced=True))
    H = span([Element(parent, (4, 0)), Element(parent, (0, 4))])
    fc = fibre_cover(A, H, max_cosets=16)
    assert len(fc.reps) <= 16
    assert fc.core.is_symmetric()


def test_sumset_growth_table():
    A = generate_example("random-symmetric ab:101 size=13 seed=5")
    K, rows = sumset_growth_table(A, 4, 4)
    assert K == doubling_constant(A)
    seen = {(r.m, r.n) for r in rows}
    assert (4, 4) in seen and (1, 1) in seen and (2, 0) in seen
    for r in rows:
        if r.m + r.n <= 5:
            assert r.within


def test_sumset_table_needs_commuting_input():
    ball = generate_example("ball ut:3:5 radius=1")
    with pytest.raises(NotAbelian):
        sumset_growth_table(ball, 2, 2)


def _centred_lift(A, n):
    ZZ = FiniteAbelian((0,))
    return PartialMap.from_function(
        A, ZZ, lambda a: Element(ZZ, (a.coords[0] - n if a.coords[0] > n // 2 else a.coords[0],))
    )


def test_centred_lift_is_triple_hom():
    A = _interval(10)
    fmap = _centred_lift(A, 101)
    assert is_centred_triple_hom(fmap)
    img = image_certificate(fmap)
    src = greedy_cover_certificate(A)
    assert img.K_upper <= src.K_upper
    assert img.aset.members == fmap.image_set().members


def test_broken_map_is_detected():
    A = _interval(4)
    table = dict(_centred_lift(A, 101).table)
    # corrupt one value: swaps break some triple product
    table[(1,)] = (2,)
    broken = PartialMap(A, FiniteAbelian((0,)), tuple(sorted(table.items())))
    assert not is_centred_triple_hom(broken)
    with pytest.raises(CertificateError):
        image_certificate(broken)


def test_triple_hom_budget():
    A = _interval(10)
    with pytest.raises(BudgetExceeded):
        is_centred_triple_hom(_centred_lift(A, 101), budget=100)


def test_image_certificate_respects_inverses():
    A = _interval(7)
    fmap = _centred_lift(A, 101)
    table = fmap.mapping()
    for c in A.members:
        assert table[A.parent.inv(c)] == fmap.codomain.inv(table[c])


def _pow(S, m):
    from growthlab import power

    return power(S, m)

"""Set calculus: exact products, powers, symmetry, and budget behaviour."""
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab import (
    BudgetExceeded,
    FiniteAbelian,
    GSet,
    ParentMismatch,
    growth_stats,
    heisenberg,
    inverse_set,
    power,
    power_chain,
    product,
    symmetrize,
    translate,
)

Z101 = FiniteAbelian((101,))
H3 = heisenberg(3)


def _gs(parent, coords):
    return GSet(parent, [parent.reduce(tuple(c) if isinstance(c, tuple) else (c,)) for c in coords], _reduced=True)


def test_product_matches_brute_force():
    A = _gs(Z101, [0, 1, 5])
    B = _gs(Z101, [2, 3])
    expect = {((a[0] + b[0]) % 101,) for a in A.members for b in B.members}
    assert product(A, B).members == frozenset(expect)


def test_product_noncommutative_order_matters():
    x = _gs(H3, [(1, 0, 0), (0, 0, 0)])
    z = _gs(H3, [(0, 0, 1), (0, 0, 0)])
    assert product(x, z) != product(z, x)


coord_sets = st.sets(st.integers(0, 100), min_size=1, max_size=8)


@settings(max_examples=80)
@given(coord_sets, coord_sets)
def test_product_inverse_antihomomorphism(aa, bb):
    A, B = _gs(Z101, aa), _gs(Z101, bb)
    assert inverse_set(product(A, B)) == product(inverse_set(B), inverse_set(A))


@settings(max_examples=80)
@given(coord_sets)
def test_symmetrize_properties(aa):
    S = symmetrize(_gs(Z101, aa))
    assert S.is_symmetric()
    assert S.contains_identity()
    assert symmetrize(S) == S


def test_power_chain_consistency():
    A = symmetrize(_gs(Z101, [1, 5]))
    chain = power_chain(A, 4)
    assert [len(c) for c in chain] == [len(power(A, k)) for k in range(1, 5)]
    assert chain[0] == A
    # identity in A makes powers nested
    for small, big in zip(chain, chain[1:]):
        assert small <= big


def test_power_zero_is_identity():
    A = _gs(H3, [(1, 0, 0)])
    P0 = power(A, 0)
    assert len(P0) == 1 and P0.contains_identity()


def test_translate():
    A = _gs(Z101, [0, 1])
    T = translate(A.parent.element((10,)), A)
    assert T.members == frozenset({(10,), (11,)})


def test_growth_stats_values_and_warning():
    A = symmetrize(_gs(Z101, [1]))
    st_ = growth_stats(A, 3)
    assert list(st_.sizes) == [3, 5, 7]
    assert str(st_.doubling) == "5/3"
    assert str(st_.tripling) == "7/3"
    rows = list(st_.csv_rows())
    assert rows[0][0] == "m"
    noid = _gs(Z101, [2, 99])
    with pytest.warns(UserWarning):
        growth_stats(noid, 2)


def test_budget_enforced():
    A = _gs(Z101, list(range(30)))
    with pytest.raises(BudgetExceeded) as ei:
        product(A, A, budget=100)
    assert ei.value.op == "product"
    with pytest.raises(BudgetExceeded):
        power(A, 3, budget=500)


def test_parent_mismatch():
    with pytest.raises(ParentMismatch):
        product(_gs(Z101, [1]), _gs(FiniteAbelian((7,)), [1]))


def test_filter_and_orderings():
    A = _gs(Z101, [5, 3, 1])
    evens = A.filter(lambda c: c[0] % 2 == 1)
    assert evens.members == frozenset({(1,), (3,), (5,)})
    assert A.sorted_members() == ((1,), (3,), (5,))
    assert list(itertools.islice((e.coords for e in A.elements()), 3)) == [
        (1,),
        (3,),
        (5,),
    ]

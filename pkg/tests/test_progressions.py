"""Progressions: ordered/word/hull realizations and the nesting chain.

word_progression is checked against an independent interleaving oracle
that enumerates every admissible generator sequence; Hall-basis counts
are checked against Witt's dimension formula.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab import (
    Element,
    FiniteAbelian,
    ProgressionSpec,
    chain_bound,
    containment_exponent,
    hall_basis,
    heisenberg,
    hull_progression,
    ordered_progression,
    term_text,
    verify_chain,
    word_progression,
)

HZ = heisenberg(0)
X = Element(HZ, (1, 0, 0))
Z = Element(HZ, (0, 0, 1))


def _interleaving_oracle(parent, gens, bounds):
    """All products where generator i or its inverse is used <= L_i times."""
    out = set()

    def walk(current, used):
        out.add(current)
        for i, g in enumerate(gens):
            if used[i] < bounds[i]:
                nxt = used[:i] + (used[i] + 1,) + used[i + 1 :]
                walk(parent.mul(current, g.coords), nxt)
                walk(parent.mul(current, parent.inv(g.coords)), nxt)

    walk(parent.identity_coords(), (0,) * len(gens))
    return out


@pytest.mark.parametrize("bounds", [(1, 1), (2, 1)])
def test_word_progression_matches_interleaving_oracle(bounds):
    spec = ProgressionSpec((X, Z), bounds)
    got = word_progression(spec)
    assert got.members == frozenset(_interleaving_oracle(HZ, (X, Z), bounds))


def test_heisenberg_chain_sizes():
    spec = ProgressionSpec((X, Z), (1, 1))
    assert len(ordered_progression(spec)) == 9
    assert len(word_progression(spec)) == 13
    hull = hull_progression(spec)
    assert len(hull.members) == 27
    cert = verify_chain(spec)
    assert (cert.ordered_size, cert.word_size, cert.hull_size) == (9, 13, 27)
    assert cert.kstar == 3
    assert cert.kstar <= cert.theoretical_bound == chain_bound(2, 2) == (96 * 2) ** 4 * 2**2


def test_chain_larger_bounds():
    cert = verify_chain(ProgressionSpec((X, Z), (2, 2)))
    assert (cert.ordered_size, cert.word_size, cert.hull_size) == (25, 87, 225)
    assert cert.kstar == 3


def test_hull_basis_contains_commutator_term():
    hull = hull_progression(ProgressionSpec((X, Z), (1, 1)))
    names = [t for t, _ in hull.describe()]
    assert "x1" in names and "x2" in names and "[x2,x1]" in names


def _witt(r: int, w: int) -> int:
    # Witt's necklace count: (1/w) sum_{d|w} mu(d) r^(w/d)
    mu = {1: 1, 2: -1, 3: -1, 4: 0}
    total = sum(mu[d] * r ** (w // d) for d in (1, 2, 3, 4) if w % d == 0 and d <= w)
    return total // w


def test_hall_basis_witt_counts():
    basis = hall_basis(2, 4)
    weights = {}
    for term in basis:
        w = 1 if isinstance(term, int) else _weight(term)
        weights[w] = weights.get(w, 0) + 1
    assert [weights.get(w, 0) for w in (1, 2, 3, 4)] == [_witt(2, w) for w in (1, 2, 3, 4)]
    assert [_witt(2, w) for w in (1, 2, 3, 4)] == [2, 1, 2, 3]


def _weight(term) -> int:
    if isinstance(term, int):
        return 1
    return _weight(term[0]) + _weight(term[1])


def test_term_text():
    basis = hall_basis(2, 3)
    rendered = {term_text(t) for t in basis}
    assert "[x2,x1]" in rendered
    assert "[[x2,x1],x1]" in rendered


def test_abelian_progressions_coincide():
    parent = FiniteAbelian((101,))
    spec = ProgressionSpec((Element(parent, (3,)), Element(parent, (5,))), (4, 4))
    P = ordered_progression(spec)
    W = word_progression(spec)
    hull = hull_progression(spec, step=1)
    assert P == W == hull.members
    assert len(P) == 57


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2))
def test_ordered_inside_word_inside_hull(l1, l2):
    spec = ProgressionSpec((X, Z), (l1, l2))
    P = ordered_progression(spec)
    W = word_progression(spec)
    hull = hull_progression(spec)
    assert P <= W
    assert W <= hull.members


def test_containment_exponent():
    spec = ProgressionSpec((X, Z), (1, 1))
    W = word_progression(spec)
    k = containment_exponent(W, spec)
    assert k == 2  # the word progression needs exactly the square
    P = ordered_progression(spec)
    for m in range(1, k):
        assert not W <= _pow(P, m)
    assert W <= _pow(P, k)


def _pow(S, m):
    from growthlab import power

    return power(S, m)


def test_rank_zero_spec():
    spec = ProgressionSpec((), ())
    assert spec.rank == 0
    with pytest.raises(ValueError):
        ordered_progression(spec)

from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grasscut.combinatorics import (
    InvalidSizeVector,
    SizeVector,
    all_pairs,
    blocks,
    enumerate_Vs,
    essential_weights,
    height,
    monomials_Gw,
    monomials_Gw_bruteforce,
    pair_type,
    pairs_meeting_block,
    pairs_of_type,
    parse_size_vector,
    size_vector_sweep,
    tau_of,
    torus_weight,
)

sizes = st.lists(st.integers(1, 3), min_size=2, max_size=5).filter(lambda s: sum(s) <= 8).map(tuple)


def test_blocks():
    assert [tuple(b) for b in blocks((1, 1, 1, 2))] == [(1,), (2,), (3,), (4, 5)]
    assert [tuple(b) for b in blocks((2, 2))] == [(1, 2), (3, 4)]
    assert [tuple(b) for b in blocks((1, 3))] == [(1,), (2, 3, 4)]


def test_tau_of():
    assert tau_of((1, 1, 1, 2), 5) == 4
    assert tau_of((1, 1, 1, 2), 1) == 1
    assert tau_of((2, 3), 4) == 2


def test_enumerate_Vs():
    assert len(enumerate_Vs((1, 1, 1, 2))) == 7
    assert enumerate_Vs((1, 1)) == [(1, 1)]
    assert set(enumerate_Vs((2, 2))) == {(2, 0), (1, 1), (0, 2)}


def test_pair_types():
    assert pair_type((1, 1, 1, 2), (4, 5)) == (0, 0, 0, 2)
    assert pair_type((1, 1, 1, 2), (1, 4)) == (1, 0, 0, 1)
    assert pair_type((2, 2), (1, 3)) == (1, 1)
    assert set(pairs_of_type((1, 1, 1, 2), (0, 0, 0, 2))) == {(4, 5)}
    assert set(pairs_of_type((1, 1, 1, 2), (1, 0, 0, 1))) == {(1, 4), (1, 5)}
    assert set(pairs_of_type((1, 1), (1, 1))) == {(1, 2)}


def test_pairs_meeting_block():
    assert set(pairs_meeting_block((1, 1, 1, 1), 1)) == {(1, 2), (1, 3), (1, 4)}
    assert set(pairs_meeting_block((1, 1, 2), 3)) == {(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}
    assert set(pairs_meeting_block((1, 1), 2)) == {(1, 2)}


def test_height():
    assert height((1, 1, 1, 1), (1, 1, 1, 1)) == 2
    assert height((1, 1, 1, 1), (3, 1, 0, 0)) == 0
    assert height((1, 1), (1, 1)) == 1


def test_monomials_Gw_examples():
    assert monomials_Gw((1, 1, 1, 1), (1, 1, 1, 1)) == [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]
    assert monomials_Gw((1, 1, 1, 1), (1, 1, 0, 0)) == [((1, 2),)]
    assert monomials_Gw((2, 1, 1), (2, 0, 0)) == [((1, 2),)]


def test_repeated_pair_allowed():
    # w = 2 * type(1,2): the only monomial is z12 squared
    assert monomials_Gw((1, 1), (2, 2)) == [((1, 2), (1, 2))]


def test_essential_weights_counts():
    assert len(essential_weights((1, 1, 1, 1))) == 7
    assert len(essential_weights((1, 1, 1, 2))) == 8
    assert essential_weights((1, 1)) == [(1, 1)]


def test_torus_weight():
    assert torus_weight((1, 1, 1, 1), [(1, 2), (3, 4)]) == (1, 1, 1, 1)
    assert torus_weight((1, 1, 1, 2), [(4, 5)]) == (0, 0, 0, 2)
    assert torus_weight((1, 1, 1, 2), []) == (0, 0, 0, 0)


def test_invalid_size_vectors():
    for bad in [(1,), (1, 0), (2, -1)]:
        with pytest.raises(InvalidSizeVector):
            SizeVector(bad)
    with pytest.raises(InvalidSizeVector):
        parse_size_vector("1,a")
    assert parse_size_vector("1,1,2").entries == (1, 1, 2)


def test_sweep_size():
    sweep = size_vector_sweep(5, 8)
    assert len(sweep) >= 30
    assert all(2 <= s.N <= 5 and s.n <= 8 for s in sweep)


@given(sizes)
def test_vs_count_formula(s):
    N = len(s)
    assert len(enumerate_Vs(s)) == comb(N, 2) + sum(1 for x in s if x >= 2)


@given(sizes)
def test_types_partition_pairs(s):
    n = sum(s)
    seen = []
    for v in enumerate_Vs(s):
        seen += pairs_of_type(s, v)
    assert sorted(seen) == all_pairs(n)
    for t in range(1, len(s) + 1):
        want = {p for v in enumerate_Vs(s) if v[t - 1] >= 1 for p in pairs_of_type(s, v)}
        assert set(pairs_meeting_block(s, t)) == want


@given(sizes)
def test_essential_weight_count_formula(s):
    N = len(s)
    assert len(essential_weights(s)) == comb(N, 2) + sum(1 for x in s if x >= 2) + comb(N, 4)


@settings(max_examples=40)
@given(sizes)
def test_oracle_and_homogeneity(s):
    for w in essential_weights(s):
        fast = monomials_Gw(s, w)
        assert fast == monomials_Gw_bruteforce(s, w)
        assert all(torus_weight(s, m) == w for m in fast)

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grasscut.combinatorics import essential_weights
from grasscut.exact_algebra import parse_ratfunc, var
from grasscut.grassmannian import (
    Indeterminate,
    Matrix2xN,
    ProjectivePoint,
    RankDeficient,
    chart_matrix_U,
    check_plucker_relations,
    map_Fw,
    map_Ft,
    map_Ks,
    map_Ks_partial,
    numeric_minors,
    plucker_minor,
    plucker_minors,
    plucker_vector,
    projectively_equal,
)

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)


def matrices(n):
    return st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=2, max_size=2)


def test_minor_examples():
    a, b = var("a"), var("b")
    theta = Matrix2xN([[1, 0, a], [0, 1, b]])
    assert plucker_minor(theta, (1, 2)) == parse_ratfunc("1")
    assert plucker_minor(theta, (2, 3)) == -a


def test_plucker_vector():
    pt = plucker_vector([[1, 0], [0, 1]])
    assert pt.labels == ((1, 2),) and pt.coords == (1,)
    pt = plucker_vector([[1, 0, 1], [0, 1, 1]])
    assert pt == ProjectivePoint(((1, 2), (1, 3), (2, 3)), (1, 1, -1))
    with pytest.raises(RankDeficient):
        plucker_vector([[1, 2, 3], [2, 4, 6]])


def test_gamma_point_minor():
    a3, a4, e3, x4 = var("a3"), var("a4"), var("e3"), var("x4")
    theta = Matrix2xN([[1, 0, a3, a4 * x4], [0, 1, a3 * e3, a4]])
    z = plucker_minors(theta)
    assert z[(1, 2)] == parse_ratfunc("1")
    assert z[(3, 4)] == a3 * a4 * (1 - e3 * x4)
    assert check_plucker_relations(z)


def test_relation_negatives():
    labels = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    only = {p: Fraction(int(p in [(1, 2), (3, 4)])) for p in labels}
    assert not check_plucker_relations(only)
    assert not check_plucker_relations({p: Fraction(1) for p in labels})


def test_map_Fw_four_points():
    t = Fraction(5, 3)
    z = numeric_minors([[1, 0, 1, 1], [0, 1, 1, t]])
    img = map_Fw((1, 1, 1, 1), (1, 1, 1, 1), z)
    # z13 = 1, z24 = -1, z14 = t, z23 = -1, z34 = t - 1
    assert img == ProjectivePoint(img.labels, (t - 1, -1, -t))
    assert map_Fw((1, 1, 1, 1), (1, 1, 0, 0), z).canonical() == (1,)


def test_map_Ft():
    z = numeric_minors([[1, 0, 2, 3], [0, 1, 5, 7]])
    img = map_Ft((1, 1, 1, 1), 1, z)
    assert img.labels == ((1, 2), (1, 3), (1, 4))
    assert img.coords == (z[(1, 2)], z[(1, 3)], z[(1, 4)])
    z0 = numeric_minors([[0, 1, 0, 0], [0, 0, 1, 1]])
    with pytest.raises(Indeterminate):
        map_Ft((1, 1, 1, 1), 1, z0)


def test_map_Ks_records_base_locus():
    z = numeric_minors([[1, 0], [0, 1]])
    assert [img.canonical() for _, img in map_Ks((1, 1), z)] == [(1,)]
    # column 5 is zero: the (0,0,0,2) factor has no nonzero coordinate
    z = numeric_minors([[1, 0, 1, 1, 0], [0, 1, 2, 1, 0]])
    part = dict(map_Ks_partial((1, 1, 1, 2), z))
    assert part[(0, 0, 0, 2)] is None
    with pytest.raises(Indeterminate):
        map_Ks((1, 1, 1, 2), z)


def test_chart_matrix_U():
    m = chart_matrix_U(1, 2, {}, 3)
    assert m.values({}) == [[1, 0, 0], [0, 1, 0]]
    a, b = var("a"), var("b")
    m = chart_matrix_U(1, 2, {(1, 3): a, (2, 3): b})
    z = plucker_minors(m)
    assert (z[(1, 2)], z[(1, 3)], z[(2, 3)]) == (parse_ratfunc("1"), b, -a)
    with pytest.raises(ValueError):
        chart_matrix_U(1, 2, {(1, 2): a})


def test_projective_equality():
    assert projectively_equal((1, 2, 0), (-2, -4, 0))
    assert not projectively_equal((1, 2, 0), (1, 2, 1))
    assert not projectively_equal((0, 1), (0, 0))
    with pytest.raises(Indeterminate):
        ProjectivePoint(((1, 2),), (0,))


@given(matrices(5))
def test_random_matrices_satisfy_plucker(m):
    z = numeric_minors(m)
    assert check_plucker_relations(z)


@given(matrices(4))
def test_cross_ratio_relation(m):
    z = numeric_minors(m)
    try:
        c = map_Fw((1, 1, 1, 1), (1, 1, 1, 1), z).canonical()
    except Indeterminate:
        return
    assert c[0] - c[1] + c[2] == 0


@given(matrices(5), st.integers(1, 5))
def test_Fw_invariant_under_row_operations(m, k):
    # left multiplication by an invertible 2x2 scales every minor by its determinant
    g = [[1, k], [0, 1]] if k % 2 else [[0, 1], [1, 0]]
    m2 = [[sum(g[i][r] * m[r][c] for r in range(2)) for c in range(5)] for i in range(2)]
    z1, z2 = numeric_minors(m), numeric_minors(m2)
    for w in essential_weights((1, 1, 1, 2)):
        try:
            a = map_Fw((1, 1, 1, 2), w, z1)
        except Indeterminate:
            continue
        assert a == map_Fw((1, 1, 1, 2), w, z2)

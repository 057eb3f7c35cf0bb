from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grasscut.exact_algebra import (
    IntPoly,
    MissingVariable,
    ParseError,
    RatFunc,
    cancel,
    divide_exact,
    from_sympy,
    irreducible_factors,
    parse_poly,
    parse_ratfunc,
    ratfunc_eq,
    to_sympy,
    var,
)

NAMES = ["a", "b", "c"]

monomials = st.tuples(*[st.integers(0, 2) for _ in NAMES]).map(
    lambda es: tuple((n, e) for n, e in zip(NAMES, es) if e))
polys = st.dictionaries(monomials, st.integers(-5, 5), max_size=4).map(IntPoly)
points = st.fixed_dictionaries({n: st.fractions(min_value=-5, max_value=5, max_denominator=7) for n in NAMES})


def test_hand_expansion():
    e = var("e")
    # (e)(-1) - (-1)(1)
    assert ratfunc_eq(e * -1 - (-1) * 1, parse_ratfunc("1 - e"))
    assert str(parse_poly("(x+1)^2")) == "x^2 + 2*x + 1"


def test_zero_and_constants():
    assert IntPoly().is_zero()
    assert IntPoly({(): 0}).is_zero()
    assert IntPoly.const(3).constant_value() == 3
    assert (var("x") - var("x")).is_zero()


def test_parse_aliases_and_errors():
    assert ratfunc_eq(parse_ratfunc("2·x − y"), parse_ratfunc("2*x - y"))
    assert ratfunc_eq(parse_ratfunc("x**3"), parse_ratfunc("x^3"))
    with pytest.raises(ParseError):
        parse_poly("1/x")
    with pytest.raises(ParseError):
        parse_ratfunc("(x+")


def test_fraction_equality_is_cross_multiplication():
    f = parse_ratfunc("(x^2 - 1)/(x - 1)")
    assert ratfunc_eq(f, parse_ratfunc("x + 1"))
    assert f == parse_ratfunc("x + 1")
    assert not ratfunc_eq(f, parse_ratfunc("x - 1"))


def test_divide_exact():
    p = parse_poly("x^2 - y^2")
    assert divide_exact(p, parse_poly("x - y")) == parse_poly("x + y")
    assert divide_exact(p, parse_poly("x + 2*y")) is None
    assert divide_exact(parse_poly("2*x"), IntPoly.const(4)) is None


def test_evaluate_missing_variable():
    with pytest.raises(MissingVariable):
        parse_poly("x + y").evaluate({"x": Fraction(1)})


def test_cancel_removes_common_factor():
    f = parse_ratfunc("(e - 1)*(x + 2)/((e - 1)*y)")
    g = cancel(f)
    assert g.den == parse_poly("y")
    assert ratfunc_eq(f, g)
    assert cancel(parse_ratfunc("(e - 1)/(1 - e)")) == RatFunc(-1)


def test_irreducible_factors():
    fs = irreducible_factors(parse_poly("2 - 2*x^2"))
    assert set(fs) == {parse_poly("x - 1"), parse_poly("x + 1")}
    assert irreducible_factors(IntPoly.const(7)) == []


@given(polys)
def test_sympy_round_trip(p):
    assert from_sympy(to_sympy(p)) == p


@settings(max_examples=60)
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p
    assert p - p == IntPoly()


@settings(max_examples=60)
@given(polys, polys, points)
def test_evaluation_is_a_homomorphism(p, q, x):
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)
    assert (p - q).evaluate(x) == p.evaluate(x) - q.evaluate(x)


@settings(max_examples=60)
@given(polys, polys)
def test_product_divides_back(p, q):
    if q.is_zero():
        return
    assert divide_exact(p * q, q) == p


@settings(max_examples=40)
@given(polys, polys.filter(lambda q: not q.is_zero()), points)
def test_ratfunc_evaluation(p, q, x):
    if q.evaluate(x) == 0:
        return
    assert RatFunc(p, q).evaluate(x) == p.evaluate(x) / q.evaluate(x)


@given(polys)
def test_str_parses_back(p):
    assert parse_poly(str(p)) == p

from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qgx.qfield import LAMBDA, ONE, Q, ZERO, ParseError, PoleError, QDivisionByZero, RatFunc, as_ratfunc, eval_at, parse

laurent = st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=4).map(
    lambda d: sum((as_ratfunc(c) * Q**e for e, c in d.items()), ZERO)
)
nonzero_laurent = laurent.filter(lambda f: not f.is_zero())
ratfuncs = st.tuples(laurent, nonzero_laurent).map(lambda p: p[0] / p[1])
points = st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(lambda x: x != 0)


def _ev(f, x):
    try:
        return eval_at(f, x)
    except PoleError:
        return None


def _laurent_value(d, x):
    return sum((Fraction(c) * x**e for e, c in d.items()), Fraction(0))


@given(st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=4), points)
def test_laurent_construction_matches_direct_evaluation(d, x):
    f = sum((as_ratfunc(c) * Q**e for e, c in d.items()), ZERO)
    assert eval_at(f, x) == _laurent_value(d, x)


@given(ratfuncs, ratfuncs, points)
def test_arithmetic_is_an_evaluation_homomorphism(a, b, x):
    va, vb = _ev(a, x), _ev(b, x)
    assume(va is not None and vb is not None)
    assert eval_at(a + b, x) == va + vb
    assert eval_at(a - b, x) == va - vb
    prod = _ev(a * b, x)
    if prod is not None:
        assert prod == va * vb
    if not b.is_zero() and vb != 0:
        quo = _ev(a / b, x)
        if quo is not None:
            assert quo == va / vb


@given(ratfuncs, ratfuncs, ratfuncs)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == ZERO
    if not a.is_zero():
        assert a * a.inverse() == ONE


@given(ratfuncs)
def test_text_round_trip(a):
    assert parse(str(a)) == a


@given(ratfuncs, ratfuncs)
def test_canonical_form_makes_equality_structural(a, b):
    assume(not b.is_zero())
    c = (a * b) / b
    assert c == a and hash(c) == hash(a)


def test_lambda_and_known_values():
    assert LAMBDA == Q - Q**-1
    assert str(LAMBDA) == "q - q^-1"
    assert str(LAMBDA * LAMBDA) == "q^2 - 2 + q^-2"
    assert parse("q^2-1") / parse("q-1") == Q + 1
    assert (Q**-3).is_monomial() and not LAMBDA.is_monomial()
    assert eval_at(LAMBDA, 2) == Fraction(3, 2)
    assert eval_at(Q**-1, Fraction(1, 3)) == 3


def test_pole_is_reported_not_evaluated():
    with pytest.raises(PoleError) as exc:
        eval_at(ONE / LAMBDA, 1)
    assert exc.value.point == 1
    with pytest.raises(ValueError):
        eval_at(Q + 1, 0)


def test_removable_singularity_evaluates():
    # canonical form cancels the common factor, so q = 1 is not a pole here
    assert eval_at(parse("(q^2-1)/(q-1)"), 1) == 2


def test_division_by_zero():
    with pytest.raises(QDivisionByZero):
        ONE / ZERO
    with pytest.raises(ZeroDivisionError):
        RatFunc(1, 0)


@pytest.mark.parametrize("text,pos", [("q+*2", 2), ("(q", 2), ("q^x", 2), ("2 $", 2)])
def test_parse_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.pos == pos

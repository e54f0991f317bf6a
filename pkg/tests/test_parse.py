from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twderham.errors import ParseError
from twderham.forms import Form
from twderham.parse import parse_form, parse_poly, used_x_variables
from twderham.poly import Poly
from twderham.rings import Integers, Rationals, TruncatedSeries

QQ = Rationals()
XY = ["x1", "x2"]


def test_power_and_product():
    p = parse_poly("x1^3/3 - 2*x1*x2 + (x2+1)^2", QQ, XY)
    assert p.coeff((3, 0)) == Fraction(1, 3)
    assert p.coeff((1, 1)) == -2
    assert p.coeff((0, 2)) == 1
    assert p.coeff((0, 0)) == 1


def test_wedge_of_differentials():
    w = parse_form("x2 * dx2^dx1", QQ, XY)
    assert w.coefficient((0, 1)) == parse_poly("-x2", QQ, XY)


def test_power_of_form_rejected_as_wedge():
    # dx1^dx1 is a wedge and vanishes
    assert parse_form("dx1^dx1", QQ, XY).is_zero()


def test_error_position():
    with pytest.raises(ParseError) as err:
        parse_poly("x1 + *x2", QQ, XY)
    assert err.value.line == 1
    assert err.value.column == 6


def test_error_position_second_line():
    with pytest.raises(ParseError) as err:
        parse_poly("x1 +\n  x2 )", QQ, XY)
    assert err.value.line == 2


@pytest.mark.parametrize("text", ["x3", "x1 / x2", "x1 / 0", "lambda*x1", "", "x1 +", "((x1)"])
def test_rejected(text):
    with pytest.raises(ParseError):
        parse_poly(text, QQ, XY)


def test_integer_ring_rejects_fractions():
    with pytest.raises(Exception):
        parse_poly("x1/2", Integers(), XY)


def test_lambda_in_series_ring():
    S = TruncatedSeries(QQ, "lambda", 3)
    p = parse_poly("(1 + lambda)*x1 + lambda^5", S, ["x1"], "lambda")
    assert p.coeff((1,)) == S.from_param_poly({0: Fraction(1), 1: Fraction(1)})
    assert p.coeff((0,)) is None or S.is_zero(p.coeff((0,)))


def test_used_variables():
    assert used_x_variables("x1 + x3*dx2") == 3
    assert used_x_variables("1") == 0


@st.composite
def small_polys(draw):
    terms = {}
    for _ in range(draw(st.integers(0, 5))):
        e = (draw(st.integers(0, 4)), draw(st.integers(0, 4)))
        terms[e] = Fraction(draw(st.integers(-9, 9)), draw(st.integers(1, 5)))
    return Poly(QQ, 2, terms)


@given(small_polys())
def test_format_parse_roundtrip(p):
    assert parse_poly(p.format(XY), QQ, XY) == p


@given(small_polys(), small_polys())
def test_form_roundtrip(a, b):
    w = Form.from_poly(a, (0,)) + Form.from_poly(b, (0, 1))
    assert parse_form(w.format(XY), QQ, XY) == w

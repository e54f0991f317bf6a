import random

import pytest
from hypothesis import given, strategies as st

from twderham.constraints import (
    ConstraintProblem,
    LaurentForm,
    certify_delta_chain_map,
    codim_m_map,
    delta_map,
    intermediate_maps,
    pole_to_t,
    regularity_report,
    residue_map,
)
from twderham.errors import FactorialNotInvertible, InputError
from twderham.forms import Form, exact_one_form, wedge
from twderham.parse import parse_form, parse_poly
from twderham.rings import Modular, Rationals
from twderham.selfcheck import _random_form, random_poly

QQ = Rationals()
X, XY = ["x1"], ["x1", "x2"]
XT, XYT = ["x1", "t"], ["x1", "x2", "t"]


def test_delta_of_one_on_line():
    out = delta_map(parse_poly("x1", QQ, X), parse_form("1", QQ, X))
    assert out == parse_form("dx1^dt", QQ, XT)


def test_delta_of_one_on_circle():
    out = delta_map(parse_poly("x1^2 + x2^2 - 1", QQ, XY), parse_form("1", QQ, XY))
    assert out == parse_form("(2*x1*dx1 + 2*x2*dx2)^dt", QQ, XYT)


def test_circle_chain_map_certificate():
    P = parse_poly("x1^2 + x2^2 - 1", QQ, XY)
    w = parse_form("x2*dx1", QQ, XY)
    cert = certify_delta_chain_map(P, w)
    assert cert.verified and cert.correction_in_ideal
    assert delta_map(P, w) == parse_form("2*x2^2*dx1^dx2^dt", QQ, XYT)


def test_pole_order_one_is_dt():
    w = parse_form("x1*dx1", QQ, X)
    assert pole_to_t(LaurentForm(w, 1)) == parse_form("x1*dx1^dt", QQ, XT)


def test_pole_order_three():
    _, out = intermediate_maps(parse_poly("x1", QQ, X), parse_form("dx1", QQ, X), 2)
    assert out == parse_form("t^2/2*dx1^dt", QQ, XT)


def test_pole_order_needs_factorial_unit():
    with pytest.raises(FactorialNotInvertible):
        pole_to_t(LaurentForm(parse_form("dx1", Modular(3), X), 4))


def test_negative_pole_rejected():
    with pytest.raises(InputError):
        intermediate_maps(parse_poly("x1", QQ, X), parse_form("1", QQ, X), -1)


def test_codim_two_example():
    cs = [parse_poly("x1", QQ, XY), parse_poly("x2", QQ, XY)]
    out = codim_m_map(ConstraintProblem(None, cs), parse_form("1", QQ, XY))
    # dx1 ^ dt1 ^ dx2 ^ dt2 = -dx1 ^ dx2 ^ dt1 ^ dt2
    assert out == parse_form("-dx1^dx2^dt1^dt2", QQ, ["x1", "x2", "t1", "t2"])
    assert out.degrees() == {4}


def test_codim_one_agrees_with_delta():
    P = parse_poly("x1^3 - x2", QQ, XY)
    w = parse_form("x1*dx2 + 1", QQ, XY)
    assert codim_m_map(ConstraintProblem(None, [P]), w) == delta_map(P, w)


def test_delta_needs_single_constraint():
    cs = [parse_poly("x1", QQ, XY), parse_poly("x2", QQ, XY)]
    with pytest.raises(InputError):
        delta_map(ConstraintProblem(None, cs), parse_form("1", QQ, XY))


def test_regularity_reports():
    circle = regularity_report(ConstraintProblem(None, [parse_poly("x1^2 + x2^2 - 1", QQ, XY)]))
    assert circle.smooth is True
    assert circle.status == "maps computed, isomorphism not guaranteed"
    cusp = regularity_report(ConstraintProblem(None, [parse_poly("x1^3 - x2^2", QQ, XY)]))
    assert cusp.smooth is False
    assert ["0", "0"] in cusp.singular_points
    line = regularity_report(ConstraintProblem(None, [parse_poly("x1", QQ, X)]))
    assert line.smooth and line.proxy_ok and line.mu == 1
    assert line.status == "isomorphism expected"


@given(st.integers(0, 10**6))
def test_residue_then_t_map_is_delta(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    P = random_poly(rng, QQ, n, 2, min_degree=1)
    w = _random_form(rng, QQ, n, rng.randint(0, n))
    res = residue_map(P, w)
    assert pole_to_t(res) == delta_map(P, w)
    assert res.numerator == wedge(w, exact_one_form(P))


@given(st.integers(0, 10**6))
def test_chain_map_certificate_random(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    c = random_poly(rng, QQ, n, 2, min_degree=1)
    f = random_poly(rng, QQ, n, 3) if rng.random() < 0.5 else None
    w = _random_form(rng, QQ, n, rng.randint(0, n))
    cert = certify_delta_chain_map(ConstraintProblem(f, [c]), w)
    assert cert.verified and cert.correction_in_ideal


@given(st.integers(0, 10**6))
def test_degree_shift(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    m = rng.randint(1, 2)
    cs = [random_poly(rng, QQ, n, 2, min_degree=1) for _ in range(m)]
    k = rng.randint(0, n)
    w = _random_form(rng, QQ, n, k)
    out = codim_m_map(ConstraintProblem(None, cs), w)
    assert out.degrees() <= {k + 2 * m}
    assert isinstance(out, Form)

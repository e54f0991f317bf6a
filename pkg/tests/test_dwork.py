import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import gauss_sum_square
from twderham.dwork import (
    FrobContext,
    RamifiedQ,
    TruncSeries,
    chain_map_residual,
    correcting_factor_exact,
    dwork_theta,
    frobenius_apply,
    frobenius_eigenvalue,
    overconvergence_slope,
    pi_adic_digits,
)
from twderham.errors import InputError, MilnorMismatch, PrecisionExhausted
from twderham.parse import parse_poly
from twderham.poly import Poly
from twderham.rings import PiAdic, Rationals

QQ = Rationals()


def f1(text):
    return parse_poly(text, QQ, ["x1"])


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_pi_relation(p):
    R = PiAdic(p, 20)
    assert R.is_zero(R.add(R.pow(R.pi(), p - 1), R.from_int(p)))


def test_theta_leading_coefficients():
    th = dwork_theta(FrobContext(5, 20, 12))
    R = th.ring
    assert R.is_one(th.coeffs[0])
    assert th.coeffs[1] == R.pi()
    # a_2 = pi^2 / 2
    assert th.coeffs[2] == R.mul(R.pow(R.pi(), 2), R.inv(R.from_int(2)))


def test_theta_slope_positive():
    th = dwork_theta(FrobContext(3, 20, 40))
    c = overconvergence_slope(th.exact_valuations())
    assert c > 0
    # the classical lower bound (p-1)/p^2 holds on the computed range
    vals = th.exact_valuations()
    assert all(v >= Fraction(2, 9) * i for i, v in enumerate(vals) if v != math.inf)


def test_theta_precision_precondition():
    with pytest.raises(PrecisionExhausted):
        dwork_theta(FrobContext(3, 5, 40))


def test_frobenius_of_dx_without_twist():
    ctx = FrobContext(5, 10, 12)
    out = frobenius_apply(ctx, Poly.zero(QQ, 1), [1])
    R = ctx.ring
    expected = [R.zero] * 13
    expected[4] = R.from_int(5)
    assert list(out.coeffs) == expected


def test_correcting_factor_inverts_theta():
    # for f = x the factor is exp(pi (x^p - x)), the reciprocal of theta
    ctx = FrobContext(3, 12, 30)
    Q, R = ctx.staging, ctx.ring
    E = TruncSeries(R, 30, tuple(Q.to_ring(R, c) for c in correcting_factor_exact(ctx, f1("x1"))))
    prod = E * dwork_theta(ctx)
    assert R.is_one(prod.coeffs[0])
    assert all(R.is_zero(c) for c in prod.coeffs[1:])


def test_frobenius_of_dx_for_linear_f():
    ctx = FrobContext(3, 12, 30)
    Q, R = ctx.staging, ctx.ring
    E = [Q.to_ring(R, c) for c in correcting_factor_exact(ctx, f1("x1"))]
    out = frobenius_apply(ctx, f1("x1"), [1])
    shifted = [R.zero] * 2 + [R.scale(3, c) for c in E[:-2]]
    assert list(out.coeffs) == shifted


def test_eigenvalue_requires_rank_one():
    with pytest.raises(MilnorMismatch):
        frobenius_eigenvalue(FrobContext(5, 20, 60), f1("x1"))
    with pytest.raises(MilnorMismatch):
        frobenius_eigenvalue(FrobContext(5, 20, 30), f1("x1^3"))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_gaussian_eigenvalue(p):
    res = frobenius_eigenvalue(FrobContext(p, 20, 60), f1("x1^2/2"))
    assert res.valuation == Fraction(1, 2)
    assert res.precision_ok
    # sign of alpha^2 from the complex quadratic Gauss sum
    assert res.alpha_squared_mod() == str(gauss_sum_square(p))
    assert res.alpha_squared_residual_valuation >= res.horizon + res.valuation


def test_digits_reconstruct_alpha():
    res = frobenius_eigenvalue(FrobContext(5, 20, 60), f1("x1^2/2"))
    R = res.ring
    total = R.zero
    for j, d in enumerate(res.digits):
        total = R.add(total, R.scale(d, R.pi_power(j)))
    k = len(res.digits)
    diff = R.sub(res.alpha, total)
    assert R.valuation(diff) >= Fraction(k, 4)


def test_digit_expansion_simple():
    R = PiAdic(5, 6)
    a = R.add(R.from_int(3), R.scale(2, R.pi_power(3)))
    assert pi_adic_digits(R, a, 6) == [3, 0, 0, 2, 0, 0]


def test_non_integral_f_rejected():
    with pytest.raises(Exception):
        frobenius_apply(FrobContext(5, 10, 10), f1("x1^2/5"), [1])


def test_context_validation():
    with pytest.raises(InputError):
        FrobContext(4, 10, 10)
    with pytest.raises(InputError):
        FrobContext(5, 10, 0)


def test_staging_field_relation():
    Q = RamifiedQ(5)
    pi = Q.pi_power(1)
    assert Q.mul(Q.pi_power(3), pi) == Q.from_fraction(-5)
    assert Q.mul(Q.inv_pi(Q.one), pi) == Q.one
    assert Q.valuation(Q.inv_pi(Q.one)) == Fraction(-1, 4)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_chain_map_residual(seed):
    rng = random.Random(seed)
    p = rng.choice([3, 5])
    ctx = FrobContext(p, 12, 24)
    f = Poly(QQ, 1, {(k,): Fraction(rng.randint(-2, 2)) for k in range(1, rng.randint(2, 4))})
    eta = [rng.randint(-3, 3) for _ in range(rng.randint(1, 12))]
    rep = chain_map_residual(ctx, f, eta)
    assert rep.ok

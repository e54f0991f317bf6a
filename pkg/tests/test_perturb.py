import warnings
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import gaussian_moment_ratio_1d, hafnian_moment, neg_inverse
from twderham.errors import InputError, MatrixNotUnimodular, NonTerminating, TorsionRing
from twderham.parse import parse_poly
from twderham.perturb import (
    GaussianProblem,
    base_change_problem,
    check_vanishing,
    integrality_report,
    integrate,
    moment_ratio_oracle,
    wick_oracle,
)
from twderham.poly import Poly, monomials_up_to
from twderham.rings import Integers, Modular, Rationals, RingHom, TruncatedSeries
from twderham.selfcheck import random_poly, random_symmetric_rational, random_unimodular_symmetric

ZZ, QQ = Integers(), Rationals()
X = ["x1"]
XY = ["x1", "x2"]


def p1(text, ring=QQ):
    return parse_poly(text, ring, X)


def p2(text, ring=QQ):
    return parse_poly(text, ring, XY)


def test_even_moments_one_variable():
    P = GaussianProblem(QQ, [[-1]])
    assert [integrate(P, p1(f"x1^{k}")).coeffs[0] for k in (2, 4, 6)] == [1, 3, 15]
    assert integrate(P, p1("x1^3")).coeffs[0] == 0


def test_normalization():
    for ring in (ZZ, QQ):
        P = GaussianProblem(ring, [[2, 1], [1, 1]], p2("x1^3", ring), 3)
        s = integrate(P, Poly.const(ring, 2, 1))
        assert list(s.coeffs) == [1, 0, 0]


def test_cubic_perturbation_first_order():
    # oracle: ratio of Gaussian moments computed with sympy
    want = gaussian_moment_ratio_1d(lambda x: x**3, lambda x: x, 2)
    P = GaussianProblem(QQ, [[-1]], p1("x1^3"), 2)
    assert list(integrate(P, p1("x1")).coeffs) == want == [0, 3]


def test_cubic_perturbation_order_four_over_integers():
    # frozen from the sympy moment-ratio oracle
    want = gaussian_moment_ratio_1d(lambda x: x**3, lambda x: x, 4)
    assert want == [0, 3, 0, 135]
    P = GaussianProblem(ZZ, [[-1]], p1("x1^3", ZZ), 4)
    assert list(integrate(P, p1("x1", ZZ)).coeffs) == [0, 3, 0, 135]


def test_quartic_against_sympy_oracle():
    want = gaussian_moment_ratio_1d(lambda x: x**4, lambda x: x**2, 4)
    P = GaussianProblem(QQ, [[-1]], p1("x1^4"), 4)
    assert list(integrate(P, p1("x1^2")).coeffs) == want


def test_sixth_moment_series():
    P = GaussianProblem(QQ, [[-1]], None, 3)
    assert list(integrate(P, p1("x1^6")).coeffs) == [15, 0, 0]


def test_off_diagonal_integrality():
    A = [[0, -1], [-1, 0]]
    rep = integrality_report(GaussianProblem(ZZ, A, p2("x1^2*x2", ZZ), 3), Poly.const(ZZ, 2, 1))
    assert rep.integral and rep.matches_rational
    assert rep.coefficients == [1, 0, 0]


def test_wick_examples():
    assert wick_oracle(QQ, [[-1]], (4,)) == 3
    assert wick_oracle(QQ, [[-1, 0], [0, -1]], (2, 2)) == 1
    assert wick_oracle(QQ, [[3]], (1,)) == 0


def test_vanishing_examples():
    P = GaussianProblem(QQ, [[2, 1], [1, -3]], p2("x1^3"), 4)
    assert check_vanishing(P, Poly.const(QQ, 2, 1), 0).is_zero()
    assert check_vanishing(P, p2("x1*x2"), 0).is_zero()
    P1 = GaussianProblem(QQ, [[-1]], p1("x1^4"), 5)
    assert check_vanishing(P1, p1("x1^5"), 0).is_zero()


def test_torsion_rejected():
    with pytest.raises(TorsionRing):
        GaussianProblem(Modular(6), [[-1]])


def test_series_base_rejected():
    with pytest.raises(InputError):
        GaussianProblem(TruncatedSeries(QQ, "lambda", 3), [[1]])


def test_non_unimodular_over_integers():
    with pytest.raises(MatrixNotUnimodular):
        GaussianProblem(ZZ, [[2]])


def test_asymmetric_rejected():
    with pytest.raises(InputError):
        GaussianProblem(QQ, [[1, 2], [3, 4]])


def test_constant_term_of_V_dropped():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        P = GaussianProblem(QQ, [[-1]], p1("x1^3 + 5"), 3)
    assert caught
    Q = GaussianProblem(QQ, [[-1]], p1("x1^3"), 3)
    assert integrate(P, p1("x1")) == integrate(Q, p1("x1"))


def test_step_cap():
    P = GaussianProblem(QQ, [[-1]], p1("x1^3"), 4)
    with pytest.raises(NonTerminating):
        integrate(P, p1("x1^9"), max_steps=2)


def test_moment_ratio_oracle_agrees():
    A = [[-2, 1], [1, -1]]
    V, g = p2("x1^2*x2 - x2^3"), p2("x1*x2 + x2")
    P = GaussianProblem(QQ, A, V, 4)
    assert list(integrate(P, g).coeffs) == moment_ratio_oracle(QQ, A, V, g, 4)


def test_wick_matches_brute_force_matchings():
    A = [[Fraction(-2), Fraction(1), 0], [Fraction(1), Fraction(-3), 0], [0, 0, Fraction(-1, 2)]]
    cov = neg_inverse(A)
    for e in monomials_up_to(3, 6):
        assert wick_oracle(QQ, A, e) == hafnian_moment(cov, e)


# ---- properties ------------------------------------------------------------

seeds = st.integers(0, 10**6)


@given(seeds)
def test_integral_agrees_with_wick(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 3)
    A = random_symmetric_rational(rng, n)
    P = GaussianProblem(QQ, A)
    e = tuple(rng.randint(0, 3) for _ in range(n))
    assert integrate(P, Poly.monomial(QQ, n, e)).coeffs[0] == wick_oracle(QQ, A, e)


@given(seeds)
def test_strategy_independence(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 3)
    P = GaussianProblem(QQ, random_symmetric_rational(rng, n), random_poly(rng, QQ, n, 3, min_degree=1), 3)
    g = random_poly(rng, QQ, n, 4)
    assert integrate(P, g) == integrate(P, g, strategy="random", seed=seed)


@given(seeds)
def test_linearity(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 2)
    P = GaussianProblem(QQ, random_symmetric_rational(rng, n), random_poly(rng, QQ, n, 3, min_degree=1), 3)
    g, h = random_poly(rng, QQ, n, 3), random_poly(rng, QQ, n, 3)
    c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    S = P.series_ring
    lhs = integrate(P, g + h.scale(c))
    rhs = S.add(tuple(integrate(P, g).coeffs), S.scale(c, tuple(integrate(P, h).coeffs)))
    assert tuple(lhs.coeffs) == rhs


@given(seeds)
def test_vanishing_relation(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 3)
    P = GaussianProblem(QQ, random_symmetric_rational(rng, n), random_poly(rng, QQ, n, 3, min_degree=1), rng.randint(1, 4))
    h = random_poly(rng, QQ, n, 3)
    assert check_vanishing(P, h, rng.randrange(n)).is_zero()


@given(seeds)
def test_base_change_commutes(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 2)
    P = GaussianProblem(ZZ, random_unimodular_symmetric(rng, n), random_poly(rng, ZZ, n, 3, min_degree=1), 3)
    g = random_poly(rng, ZZ, n, 3)
    for h in (RingHom(ZZ, Modular(7)), RingHom(ZZ, QQ), RingHom(ZZ, Modular(9))):
        assert integrate(P, g).base_change(h) == integrate(base_change_problem(P, h), g.base_change(h))


@given(seeds)
def test_integrality_unimodular(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 2)
    P = GaussianProblem(ZZ, random_unimodular_symmetric(rng, n), random_poly(rng, ZZ, n, 4, min_degree=1, coeff=2), 5)
    rep = integrality_report(P, random_poly(rng, ZZ, n, 4))
    assert rep.integral and rep.matches_rational

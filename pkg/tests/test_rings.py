from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twderham.errors import DenominatorNotInvertible, InputError, NotAUnit
from twderham.rings import (
    Integers,
    Modular,
    PiAdic,
    Rationals,
    RationalFunctions,
    RingHom,
    TruncatedSeries,
    parse_ring,
)

ZZ, QQ = Integers(), Rationals()
S3 = TruncatedSeries(QQ, "lambda", 3)

ints = st.integers(-50, 50)
fracs = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))


def test_fraction_sum():
    assert QQ.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)


def test_series_product_truncates():
    a = S3.from_param_poly({0: Fraction(1), 1: Fraction(1)})
    b = S3.from_param_poly({0: Fraction(1), 1: Fraction(-1), 2: Fraction(1)})
    assert S3.is_one(S3.mul(a, b))


def test_modular_product():
    F7 = Modular(7)
    assert F7.mul(5, 3) == 1


def test_modular_inverse_prime_power():
    # extended Euclid: 3 * 1601 = 4803 = 2 * 2401 + 1
    R = Modular(2401)
    assert R.inv(3) == 1601
    assert (3 * 1601) % 2401 == 1


def test_series_inverse_is_geometric():
    a = S3.from_param_poly({0: Fraction(1), 1: Fraction(1)})
    assert S3.inv(a) == S3.from_param_poly({0: Fraction(1), 1: Fraction(-1), 2: Fraction(1)})


def test_integer_units():
    assert ZZ.inv(-1) == -1
    with pytest.raises(NotAUnit):
        ZZ.inv(2)


def test_modular_nonunit():
    with pytest.raises(NotAUnit):
        Modular(6).inv(3)


def test_homomorphism_examples():
    assert RingHom(ZZ, Modular(5)).apply(7) == 2
    assert RingHom(ZZ, QQ).apply(-3) == Fraction(-3, 1)
    with pytest.raises(DenominatorNotInvertible):
        RingHom(QQ, Modular(5)).apply(Fraction(1, 5))


def test_series_hom_maps_coefficients():
    h = RingHom(TruncatedSeries(ZZ, "lambda", 3), TruncatedSeries(Modular(5), "lambda", 3))
    assert h.apply((7, 5, -1)) == (2, 0, 4)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("ZZ", "ZZ"),
        ("QQ", "QQ"),
        ("Zmod:343", "Zmod:343"),
        ("series:QQ:lambda:8", None),
        ("padic:p=5:N=20:D=60", None),
    ],
)
def test_ring_spec_parses(text, expected):
    R = parse_ring(text)
    if expected:
        assert str(R) == expected


@pytest.mark.parametrize("text", ["", "RR", "Zmod", "Zmod:x", "series:QQ", "padic:p=4:N=3", "ZZ:extra"])
def test_ring_spec_rejects(text):
    with pytest.raises(InputError):
        parse_ring(text)


def test_pi_relation_small_primes():
    for p in (3, 5, 7, 11):
        R = PiAdic(p, 10)
        assert R.add(R.pow(R.pi(), p - 1), R.from_int(p)) == R.zero


def test_padic_valuation_of_pi_and_p():
    R = PiAdic(5, 10)
    assert R.valuation(R.pi()) == Fraction(1, 4)
    assert R.valuation(R.from_int(25)) == 2


def test_rational_functions_field():
    K = RationalFunctions("lambda")
    lam = K.gen()
    x = K.div(K.one, lam)
    assert K.is_one(K.mul(x, lam))
    assert K.derivative(x) == K.neg(K.div(K.one, K.mul(lam, lam)))


# ---- properties ------------------------------------------------------------

RINGS = [
    (ZZ, ints),
    (QQ, fracs),
    (Modular(7), ints),
    (Modular(343), ints),
]


@pytest.mark.parametrize("R, elems", RINGS, ids=lambda r: str(r) if not hasattr(r, "example") else "")
@given(data=st.data())
def test_ring_axioms(R, elems, data):
    a, b, c = (R.convert(data.draw(elems)) for _ in range(3))
    assert R.add(a, b) == R.add(b, a)
    assert R.mul(a, b) == R.mul(b, a)
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
    assert R.is_zero(R.add(a, R.neg(a)))
    assert R.mul(a, R.one) == a


series_elems = st.lists(fracs, min_size=1, max_size=4).map(lambda cs: S3.from_param_poly(dict(enumerate(cs))))


@given(series_elems, series_elems, series_elems)
def test_series_ring_axioms(a, b, c):
    R = S3
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))


@given(series_elems)
def test_series_unit_iff_constant_unit(a):
    if a[0] != 0:
        assert S3.is_one(S3.mul(a, S3.inv(a)))
    else:
        with pytest.raises(NotAUnit):
            S3.inv(a)


@given(st.lists(ints, min_size=4, max_size=4), st.lists(ints, min_size=4, max_size=4))
def test_padic_ring_laws(xs, ys):
    R = PiAdic(5, 6)
    a = tuple(x % R.modulus for x in xs)
    b = tuple(y % R.modulus for y in ys)
    assert R.mul(a, b) == R.mul(b, a)
    assert R.sub(R.add(a, b), b) == a
    if R.is_unit(a):
        assert R.is_one(R.mul(a, R.inv(a)))


@given(ints, ints)
def test_homs_commute_with_operations(a, b):
    for target in (Modular(7), QQ, Modular(49)):
        h = RingHom(ZZ, target)
        assert h.apply(ZZ.add(a, b)) == target.add(h.apply(a), h.apply(b))
        assert h.apply(ZZ.mul(a, b)) == target.mul(h.apply(a), h.apply(b))


@given(fracs.filter(lambda q: q.denominator % 7))
def test_rational_to_modular_respects_inverse(q):
    h = RingHom(QQ, Modular(7))
    if q.numerator % 7:
        assert Modular(7).mul(h.apply(q), h.apply(1 / q)) == 1

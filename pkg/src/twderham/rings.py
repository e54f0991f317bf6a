"""Exact coefficient rings.

A ring is a frozen dataclass, so two ring descriptions compare equal exactly
when they describe the same ring.  Ring objects operate on *payloads*, the
canonical raw representatives of their elements:

==========================  ==============================================
ring                        payload
==========================  ==============================================
``Integers()``              ``int``
``Rationals()``             ``Fraction`` (reduced, positive denominator)
``Modular(m)``              ``int`` in ``[0, m)``
``TruncatedSeries(B, v, N)`` tuple of ``N`` payloads of ``B``
``PiAdic(p, N)``            tuple of ``p - 1`` ints in ``[0, p**N)``,
                            the coefficients of ``1, pi, ..., pi**(p-2)``
``RationalFunctions(v)``    ``(num, den)`` dense ascending Fraction tuples,
                            coprime, ``den`` monic
==========================  ==============================================

Polynomial and matrix code works on payloads directly for speed; the
:class:`RingElement` wrapper is the checked, user-facing value type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import (
    DenominatorNotInvertible,
    InputError,
    NotAUnit,
    SpecMismatch,
)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not ring elements")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q (ascending coefficient tuples)
# ---------------------------------------------------------------------------

def up_strip(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def up_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return up_strip(out)


def up_neg(a):
    return tuple(-c for c in a)


def up_sub(a, b):
    return up_add(a, up_neg(b))


def up_scale(a, c):
    if c == 0:
        return ()
    return tuple(x * c for x in a)


def up_mul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return up_strip(out)


def up_divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    lead = b[-1]
    db = len(b) - 1
    if len(rem) - 1 < db:
        return (), up_strip(rem)
    quo = [Fraction(0)] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        c = c / lead
        quo[k - db] = c
        for j, y in enumerate(b):
            rem[k - db + j] -= c * y
    return up_strip(quo), up_strip(rem[:db])


def up_monic(a):
    if not a:
        return a
    lead = a[-1]
    if lead == 1:
        return a
    return tuple(c / lead for c in a)


def up_gcd(a, b):
    """Monic gcd (the gcd of two zeros is zero)."""
    a, b = up_strip(a), up_strip(b)
    while b:
        a, b = b, up_divmod(a, b)[1]
    return up_monic(a)


def up_deriv(a):
    return up_strip(tuple(i * c for i, c in enumerate(a))[1:])


def up_eval(a, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def up_format(a, var="lambda") -> str:
    if not a:
        return "0"
    parts = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if c == 0:
            continue
        if k == 0:
            mono = ""
        elif k == 1:
            mono = var
        else:
            mono = f"{var}^{k}"
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        parts.append((sign, body))
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# rings
# ---------------------------------------------------------------------------

class Ring:
    """Shared arithmetic surface; subclasses define the payload operations."""

    is_field = False
    torsion_free = True
    characteristic_zero = True

    # --- element construction -------------------------------------------
    def __call__(self, value) -> RingElement:
        return RingElement(self, self.convert(value))

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def from_fraction(self, q: Fraction):
        if q.denominator == 1:
            return self.from_int(q.numerator)
        den = self.from_int(q.denominator)
        try:
            inv = self.inv(den)
        except NotAUnit:
            raise DenominatorNotInvertible(
                f"denominator {q.denominator} is not invertible in {self}"
            ) from None
        return self.mul(self.from_int(q.numerator), inv)

    def convert(self, value):
        if isinstance(value, RingElement):
            if value.ring != self:
                return RingHom(value.ring, self).apply(value.value)
            return value.value
        return self.from_fraction(_to_fraction(value))

    # --- arithmetic -------------------------------------------------------
    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero

    def is_one(self, a) -> bool:
        return a == self.one

    def is_unit(self, a) -> bool:
        try:
            self.inv(a)
        except NotAUnit:
            return False
        return True

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def sum(self, items):
        acc = self.zero
        for x in items:
            acc = self.add(acc, x)
        return acc

    def fmt(self, a) -> str:
        return str(a)

    def needs_parens(self, a) -> bool:
        """True when ``fmt(a)`` is a sum and must be bracketed in a product."""
        return False

    def from_param_poly(self, coeffs: dict[int, Fraction]):
        """Embed a polynomial in the ring's parameter (lambda) if it has one."""
        if any(k != 0 for k, c in coeffs.items() if c != 0):
            raise InputError(f"{self} has no parameter variable")
        return self.from_fraction(coeffs.get(0, Fraction(0)))


@dataclass(frozen=True)
class Integers(Ring):
    def __str__(self):
        return "ZZ"

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def inv(self, a):
        if a in (1, -1):
            return a
        raise NotAUnit(f"{a} is not a unit in ZZ")

    def pow(self, a, k):
        if k < 0:
            return self.inv(a) ** (-k)
        return a ** k


@dataclass(frozen=True)
class Rationals(Ring):
    is_field = True

    def __str__(self):
        return "QQ"

    def from_int(self, n):
        return Fraction(n)

    def from_fraction(self, q):
        return q

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def inv(self, a):
        if a == 0:
            raise NotAUnit("0 is not a unit in QQ")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise NotAUnit("0 is not a unit in QQ")
        return a / b

    def pow(self, a, k):
        if k < 0 and a == 0:
            raise NotAUnit("0 is not a unit in QQ")
        return a ** k


@dataclass(frozen=True)
class Modular(Ring):
    modulus: int

    torsion_free = False
    characteristic_zero = False

    def __post_init__(self):
        if not isinstance(self.modulus, int) or self.modulus < 2:
            raise InputError(f"modulus must be an integer >= 2, got {self.modulus!r}")

    def __str__(self):
        return f"Zmod:{self.modulus}"

    @property
    def is_field(self):
        return _is_prime(self.modulus)

    def from_int(self, n):
        return n % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def is_zero(self, a):
        return a == 0

    def inv(self, a):
        try:
            return pow(a, -1, self.modulus)
        except ValueError:
            raise NotAUnit(f"{a} is not a unit mod {self.modulus}") from None

    def pow(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        return pow(a, k, self.modulus)


@dataclass(frozen=True)
class TruncatedSeries(Ring):
    """``base[var] / (var**order)`` with dense coefficient tuples."""

    base: Ring
    var: str = "lambda"
    order: int = 1

    def __post_init__(self):
        if isinstance(self.base, TruncatedSeries):
            raise InputError("nested truncated series rings are not supported")
        if not isinstance(self.base, Ring):
            raise InputError(f"series base must be a ring, got {self.base!r}")
        if not isinstance(self.order, int) or self.order < 1:
            raise InputError(f"series order must be >= 1, got {self.order!r}")

    def __str__(self):
        return f"series:{self.base}:{self.var}:{self.order}"

    @property
    def torsion_free(self):
        return self.base.torsion_free

    @property
    def characteristic_zero(self):
        return self.base.characteristic_zero

    def from_int(self, n):
        b = self.base
        return (b.from_int(n),) + (b.zero,) * (self.order - 1)

    def from_fraction(self, q):
        b = self.base
        return (b.from_fraction(q),) + (b.zero,) * (self.order - 1)

    def constant(self, c):
        """Embed a base payload as a constant series."""
        return (c,) + (self.base.zero,) * (self.order - 1)

    def gen(self):
        if self.order == 1:
            return self.zero
        b = self.base
        return (b.zero, b.one) + (b.zero,) * (self.order - 2)

    def from_param_poly(self, coeffs):
        b = self.base
        out = [b.zero] * self.order
        for k, c in coeffs.items():
            if k < self.order and c != 0:
                out[k] = b.add(out[k], b.from_fraction(c))
        return tuple(out)

    def add(self, a, b):
        add = self.base.add
        return tuple(add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        neg = self.base.neg
        return tuple(neg(x) for x in a)

    def sub(self, a, b):
        sub = self.base.sub
        return tuple(sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        base = self.base
        N = self.order
        out = [base.zero] * N
        for i, x in enumerate(a):
            if base.is_zero(x):
                continue
            for j in range(N - i):
                y = b[j]
                if base.is_zero(y):
                    continue
                out[i + j] = base.add(out[i + j], base.mul(x, y))
        return tuple(out)

    def scale(self, c, a):
        """Multiply a series by a base payload."""
        mul = self.base.mul
        return tuple(mul(c, x) for x in a)

    def shift(self, a, k=1):
        """Multiply by ``var**k``."""
        z = self.base.zero
        return (z,) * k + tuple(a[: self.order - k]) if k < self.order else (z,) * self.order

    def is_zero(self, a):
        iz = self.base.is_zero
        return all(iz(x) for x in a)

    def inv(self, a):
        base = self.base
        try:
            c0 = base.inv(a[0])
        except NotAUnit:
            raise NotAUnit(f"{self.fmt(a)} has non-invertible constant term in {self}") from None
        N = self.order
        out = [c0] + [base.zero] * (N - 1)
        # out_k = -c0 * sum_{j=1..k} a_j out_{k-j}
        for k in range(1, N):
            acc = base.zero
            for j in range(1, k + 1):
                if not base.is_zero(a[j]):
                    acc = base.add(acc, base.mul(a[j], out[k - j]))
            out[k] = base.neg(base.mul(c0, acc))
        return tuple(out)

    def fmt(self, a):
        base = self.base
        parts = []
        for k, c in enumerate(a):
            if base.is_zero(c):
                continue
            cs = base.fmt(c)
            if base.needs_parens(c):
                cs = f"({cs})"
            if k == 0:
                parts.append(cs)
            else:
                mono = self.var if k == 1 else f"{self.var}^{k}"
                if base.is_one(c):
                    parts.append(mono)
                elif base.is_one(base.neg(c)):
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{cs}*{mono}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def needs_parens(self, a):
        base = self.base
        return sum(1 for c in a if not base.is_zero(c)) > 1 or (
            not base.is_zero(a[0]) and base.needs_parens(a[0])
        )


@dataclass(frozen=True)
class PiAdic(Ring):
    """``Z_p[pi] / (p**N)`` with ``pi**(p-1) = -p`` (``p`` odd).

    Elements are ``sum c_i pi**i`` for ``i < p - 1``; the ring equals
    ``Z_p[pi] / (pi**((p-1)*N))`` so coefficientwise reduction is exact.
    """

    p: int
    N: int

    torsion_free = False
    characteristic_zero = False

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p) or self.p == 2:
            raise InputError(f"pi-adic rings need an odd prime, got {self.p!r}")
        if not isinstance(self.N, int) or self.N < 1:
            raise InputError(f"pi-adic precision must be >= 1, got {self.N!r}")

    def __str__(self):
        return f"padic:p={self.p}:N={self.N}"

    @property
    def modulus(self):
        return self.p ** self.N

    @property
    def degree(self):
        return self.p - 1

    def from_int(self, n):
        return (n % self.modulus,) + (0,) * (self.p - 2)

    def pi(self):
        if self.p == 3:
            return (0, 1)
        return (0, 1) + (0,) * (self.p - 3)

    def pi_power(self, k: int):
        """``pi**k`` for ``k >= 0``."""
        q, r = divmod(k, self.p - 1)
        out = [0] * (self.p - 1)
        out[r] = pow(-self.p, q, self.modulus) if q else 1
        return tuple(c % self.modulus for c in out)

    def add(self, a, b):
        m = self.modulus
        return tuple((x + y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.modulus
        return tuple((-x) % m for x in a)

    def sub(self, a, b):
        m = self.modulus
        return tuple((x - y) % m for x, y in zip(a, b))

    def scale(self, c: int, a):
        m = self.modulus
        return tuple((c * x) % m for x in a)

    def mul(self, a, b):
        d = self.p - 1
        m = self.modulus
        out = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        # pi**(d + j) = -p * pi**j
        for k in range(2 * d - 2, d - 1, -1):
            if out[k]:
                out[k - d] -= self.p * out[k]
        return tuple(c % m for c in out[:d])

    def is_zero(self, a):
        return not any(a)

    def valuation(self, a):
        """Normalized valuation (``v(p) = 1``) as a Fraction, ``math.inf`` for 0."""
        best = math.inf
        for i, c in enumerate(a):
            if c:
                v = 0
                while c % self.p == 0:
                    c //= self.p
                    v += 1
                best = min(best, Fraction(v) + Fraction(i, self.p - 1))
        return best

    def inv(self, a):
        if a[0] % self.p == 0:
            raise NotAUnit(f"{self.fmt(a)} is not a unit in {self}")
        # Newton iteration x <- x (2 - a x); each step doubles the pi-adic precision.
        x = self.from_int(pow(a[0], -1, self.modulus))
        two = self.from_int(2)
        target = (self.p - 1) * self.N
        prec = 1
        while prec < target:
            x = self.mul(x, self.sub(two, self.mul(a, x)))
            prec *= 2
        return x

    def fmt(self, a):
        parts = []
        for i, c in enumerate(a):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "pi" if i == 1 else f"pi^{i}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) if parts else "0"

    def needs_parens(self, a):
        return sum(1 for c in a if c) > 1

    def from_fraction(self, q):
        if q.denominator % self.p == 0:
            raise DenominatorNotInvertible(
                f"denominator {q.denominator} is divisible by p={self.p}"
            )
        m = self.modulus
        return ((q.numerator * pow(q.denominator, -1, m)) % m,) + (0,) * (self.p - 2)


@dataclass(frozen=True)
class RationalFunctions(Ring):
    """The field ``Q(var)`` of reduced fractions of univariate polynomials."""

    var: str = "lambda"

    is_field = True

    def __str__(self):
        return f"QQ({self.var})"

    def _make(self, num, den):
        num, den = up_strip(num), up_strip(den)
        if not den:
            raise NotAUnit("zero denominator")
        if not num:
            return ((), (Fraction(1),))
        g = up_gcd(num, den)
        if len(g) > 1:
            num = up_divmod(num, g)[0]
            den = up_divmod(den, g)[0]
        lead = den[-1]
        if lead != 1:
            num = up_scale(num, 1 / lead)
            den = up_scale(den, 1 / lead)
        return (num, den)

    def from_int(self, n):
        return self.from_fraction(Fraction(n))

    def from_fraction(self, q):
        return ((q,) if q else (), (Fraction(1),))

    def from_param_poly(self, coeffs):
        if not coeffs:
            return self.zero
        deg = max(coeffs)
        num = [Fraction(0)] * (deg + 1)
        for k, c in coeffs.items():
            num[k] += c
        return (up_strip(num), (Fraction(1),))

    def from_poly(self, num, den=(Fraction(1),)):
        return self._make(tuple(Fraction(c) for c in num), tuple(Fraction(c) for c in den))

    def gen(self):
        return ((Fraction(0), Fraction(1)), (Fraction(1),))

    def add(self, a, b):
        (an, ad), (bn, bd) = a, b
        if ad == bd:
            return self._make(up_add(an, bn), ad)
        return self._make(up_add(up_mul(an, bd), up_mul(bn, ad)), up_mul(ad, bd))

    def neg(self, a):
        return (up_neg(a[0]), a[1])

    def mul(self, a, b):
        (an, ad), (bn, bd) = a, b
        if not an or not bn:
            return self.zero
        if len(ad) == 1 and len(bd) == 1:
            return (up_mul(an, bn), (Fraction(1),))
        return self._make(up_mul(an, bn), up_mul(ad, bd))

    def is_zero(self, a):
        return not a[0]

    def inv(self, a):
        num, den = a
        if not num:
            raise NotAUnit("0 is not a unit in a field")
        return self._make(den, num)

    def derivative(self, a):
        num, den = a
        return self._make(
            up_sub(up_mul(up_deriv(num), den), up_mul(num, up_deriv(den))),
            up_mul(den, den),
        )

    def evaluate(self, a, x: Fraction):
        num, den = a
        d = up_eval(den, x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {self.var} = {x}")
        return up_eval(num, x) / d

    def fmt(self, a):
        num, den = a
        ns = up_format(num, self.var)
        if den == (Fraction(1),):
            return ns
        if len(num) > 1 and sum(1 for c in num if c) > 1:
            ns = f"({ns})"
        ds = up_format(den, self.var)
        if sum(1 for c in den if c) > 1 or (len(den) > 1 and den[-1] != 1):
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def needs_parens(self, a):
        num, den = a
        return sum(1 for c in num if c) > 1 or len(den) > 1


# ---------------------------------------------------------------------------
# checked element wrapper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingElement:
    ring: Ring
    value: Any

    def _other(self, other):
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise SpecMismatch(f"{self.ring} vs {other.ring}")
            return other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.ring.from_fraction(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.mul(self.value, o))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.value))

    def __pow__(self, k: int):
        return RingElement(self.ring, self.ring.pow(self.value, k))

    def inverse(self):
        return RingElement(self.ring, self.ring.inv(self.value))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.div(self.value, o))

    def is_zero(self):
        return self.ring.is_zero(self.value)

    def __str__(self):
        return self.ring.fmt(self.value)


def ring_add(a: RingElement, b: RingElement) -> RingElement:
    if a.ring != b.ring:
        raise SpecMismatch(f"{a.ring} vs {b.ring}")
    return RingElement(a.ring, a.ring.add(a.value, b.value))


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    if a.ring != b.ring:
        raise SpecMismatch(f"{a.ring} vs {b.ring}")
    return RingElement(a.ring, a.ring.mul(a.value, b.value))


def ring_neg(a: RingElement) -> RingElement:
    return RingElement(a.ring, a.ring.neg(a.value))


def ring_inverse(a: RingElement) -> RingElement:
    return RingElement(a.ring, a.ring.inv(a.value))


# ---------------------------------------------------------------------------
# homomorphisms
# ---------------------------------------------------------------------------

def _map_payload(src: Ring, dst: Ring, x):
    if src == dst:
        return x
    if isinstance(src, Integers):
        return dst.from_int(x)
    if isinstance(src, Rationals):
        if isinstance(dst, (Integers,)):
            raise _unsupported(src, dst)
        try:
            return dst.from_fraction(x)
        except NotAUnit:
            raise DenominatorNotInvertible(
                f"denominator of {x} is not invertible in {dst}"
            ) from None
    if isinstance(src, Modular) and isinstance(dst, Modular):
        if src.modulus % dst.modulus:
            raise _unsupported(src, dst)
        return x % dst.modulus
    if isinstance(src, TruncatedSeries) and isinstance(dst, TruncatedSeries):
        if src.var != dst.var or dst.order > src.order:
            raise _unsupported(src, dst)
        return tuple(_map_payload(src.base, dst.base, c) for c in x[: dst.order])
    if isinstance(dst, TruncatedSeries) and not isinstance(src, TruncatedSeries):
        return dst.constant(_map_payload(src, dst.base, x))
    if isinstance(src, PiAdic) and isinstance(dst, PiAdic):
        if src.p != dst.p or dst.N > src.N:
            raise _unsupported(src, dst)
        return tuple(c % dst.modulus for c in x)
    raise _unsupported(src, dst)


def _unsupported(src, dst):
    return InputError(f"no supported homomorphism {src} -> {dst}")


@dataclass(frozen=True)
class RingHom:
    """A canonical ring homomorphism ``domain -> codomain``.

    Supported: identity, ZZ -> anything, QQ -> rings where the denominator is
    invertible (checked per element), Zmod:m -> Zmod:d for d | m, coefficientwise
    base change between truncated series rings (order may only drop), constant
    embedding into a series ring, and precision drop between pi-adic rings.
    """

    domain: Ring
    codomain: Ring

    def __post_init__(self):
        # Probe the pair once so unsupported combinations fail at construction.
        _map_payload(self.domain, self.codomain, self.domain.zero)

    def apply(self, payload):
        return _map_payload(self.domain, self.codomain, payload)

    def __call__(self, a: RingElement) -> RingElement:
        return ring_hom_apply(self, a)


def ring_hom_apply(h: RingHom, a: RingElement) -> RingElement:
    if a.ring != h.domain:
        raise SpecMismatch(f"element of {a.ring} given to hom from {h.domain}")
    return RingElement(h.codomain, h.apply(a.value))


# ---------------------------------------------------------------------------
# ring-spec mini-language
# ---------------------------------------------------------------------------

def parse_ring(text: str) -> Ring:
    """Parse ``ZZ``, ``QQ``, ``Zmod:343``, ``series:QQ:lambda:8``,
    ``padic:p=5:N=20[:D=60]`` (the ``D`` field belongs to the Frobenius
    context and is validated but not part of the ring)."""
    tokens = text.strip().split(":")
    ring, rest = _parse_ring_tokens(tokens, text)
    if rest:
        raise InputError(f"trailing ring-spec fields {':'.join(rest)!r} in {text!r}")
    return ring


def parse_ring_options(text: str) -> dict[str, int]:
    """Return the ``key=value`` integer fields of a pi-adic ring spec."""
    tokens = text.strip().split(":")
    if tokens[0] != "padic":
        return {}
    return _kv(tokens[1:], text)


def _kv(tokens, text):
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise InputError(f"expected key=value in ring spec {text!r}, got {tok!r}")
        try:
            out[key.strip()] = int(val)
        except ValueError:
            raise InputError(f"non-integer value {val!r} in ring spec {text!r}") from None
    return out


def _parse_ring_tokens(tokens, text):
    if not tokens or not tokens[0]:
        raise InputError(f"empty ring spec {text!r}")
    head, rest = tokens[0].strip(), tokens[1:]
    if head == "ZZ":
        return Integers(), rest
    if head == "QQ":
        return Rationals(), rest
    if head == "Zmod":
        if not rest:
            raise InputError(f"Zmod needs a modulus in {text!r}")
        try:
            m = int(rest[0])
        except ValueError:
            raise InputError(f"bad modulus {rest[0]!r} in {text!r}") from None
        return Modular(m), rest[1:]
    if head == "series":
        base, rest = _parse_ring_tokens(rest, text)
        if len(rest) < 2:
            raise InputError(f"series needs a variable and an order in {text!r}")
        var = rest[0]
        try:
            order = int(rest[1])
        except ValueError:
            raise InputError(f"bad series order {rest[1]!r} in {text!r}") from None
        return TruncatedSeries(base, var, order), rest[2:]
    if head == "padic":
        opts = _kv(rest, text)
        unknown = set(opts) - {"p", "N", "D"}
        if unknown or "p" not in opts or "N" not in opts:
            raise InputError(f"padic spec needs p= and N= (optional D=) in {text!r}")
        return PiAdic(opts["p"], opts["N"]), []
    raise InputError(f"unknown ring {head!r} in {text!r}")

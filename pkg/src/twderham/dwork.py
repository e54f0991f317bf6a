"""Dwork's Frobenius on one-variable twisted complexes, at finite p-adic precision.

Coefficients live in ``Z_p[pi]`` with ``pi^(p-1) = -p``.  Series whose
coefficients carry factorial denominators (``pi^k / k!``) are first built
exactly in ``Q(pi)`` (:class:`RamifiedQ`) where the denominators cancel, and
only then reduced modulo ``p^N`` into :class:`~twderham.rings.PiAdic`.

The Frobenius on ``H_{pi f}`` sends ``w(x) dx`` to
``w(x^p) p x^(p-1) exp(pi (f(x^p) - f(x))) dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    DenominatorNotInvertible,
    InputError,
    MilnorMismatch,
    NotZeroDimensional,
    PrecisionExhausted,
    ReductionDiverged,
)
from .milnor import milnor_basis
from .poly import Poly
from .rings import Integers, PiAdic, Rationals, RingHom


def _vp(x: Fraction, p: int):
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class RamifiedQ:
    """Exact arithmetic in ``Q(pi) = Q[pi] / (pi^(p-1) + p)``."""

    def __init__(self, p: int):
        self.p = p
        self.d = p - 1

    @property
    def zero(self):
        return (Fraction(0),) * self.d

    @property
    def one(self):
        return (Fraction(1),) + (Fraction(0),) * (self.d - 1)

    def from_fraction(self, q) -> tuple:
        return (Fraction(q),) + (Fraction(0),) * (self.d - 1)

    def pi_power(self, k: int):
        if k < 0:
            raise ValueError("negative pi power; use inv_pi")
        q, r = divmod(k, self.d)
        out = [Fraction(0)] * self.d
        out[r] = Fraction((-self.p) ** q)
        return tuple(out)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def scale(self, c, a):
        return tuple(c * x for x in a)

    def mul(self, a, b):
        d = self.d
        out = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            if out[k]:
                out[k - d] -= self.p * out[k]
        return tuple(out[:d])

    def inv_pi(self, a):
        """``a / pi``, using ``1/pi = -pi^(p-2) / p``."""
        # pi^(i-1) for i >= 1; a_0 / pi = -a_0 pi^(d-1) / p
        out = list(a[1:]) + [Fraction(0)]
        out[self.d - 1] += -a[0] / self.p
        return tuple(out)

    def is_zero(self, a):
        return not any(a)

    def valuation(self, a):
        best = math.inf
        for i, c in enumerate(a):
            if c:
                best = min(best, Fraction(_vp(c, self.p)) + Fraction(i, self.d))
        return best

    def denominator_exponent(self, a) -> int:
        """Smallest ``e >= 0`` with ``p^e a`` integral."""
        return max([0] + [-_vp(c, self.p) for c in a if c])

    def to_ring(self, R: PiAdic, a):
        if R.p != self.p:
            raise InputError("prime mismatch")
        m = R.modulus
        out = []
        for c in a:
            if c.denominator % self.p == 0:
                raise DenominatorNotInvertible(f"{c} is not p-integral")
            out.append((c.numerator * pow(c.denominator, -1, m)) % m)
        return tuple(out)


@dataclass(frozen=True)
class FrobContext:
    """Prime ``p`` (odd), precision ``N`` (digits of ``p``), degree cutoff ``D``."""

    p: int
    N: int
    D: int

    def __post_init__(self):
        PiAdic(self.p, self.N)  # validates p and N
        if not isinstance(self.D, int) or self.D < 1:
            raise InputError(f"degree cutoff must be >= 1, got {self.D!r}")

    @property
    def ring(self) -> PiAdic:
        return PiAdic(self.p, self.N)

    @property
    def staging(self) -> RamifiedQ:
        return RamifiedQ(self.p)


@dataclass
class TruncSeries:
    """``sum a_i x^i`` for ``i <= D`` over a pi-adic ring.

    ``loss`` counts p-digits of the ring precision that are no longer trusted.
    ``exact`` optionally keeps the staging values the coefficients came from.
    """

    ring: PiAdic
    D: int
    coeffs: tuple
    loss: int = 0
    exact: tuple | None = field(default=None, repr=False)

    @property
    def precision(self) -> int:
        return self.ring.N - self.loss

    def __mul__(self, other: TruncSeries) -> TruncSeries:
        if self.ring != other.ring:
            raise InputError("series over different rings")
        D = min(self.D, other.D)
        R = self.ring
        out = [R.zero] * (D + 1)
        for i in range(D + 1):
            a = self.coeffs[i]
            if R.is_zero(a):
                continue
            for j in range(D + 1 - i):
                b = other.coeffs[j]
                if not R.is_zero(b):
                    out[i + j] = R.add(out[i + j], R.mul(a, b))
        return TruncSeries(R, D, tuple(out), max(self.loss, other.loss))

    def valuations(self) -> list:
        return [self.ring.valuation(c) for c in self.coeffs]

    def exact_valuations(self) -> list:
        if self.exact is None:
            return self.valuations()
        Q = RamifiedQ(self.ring.p)
        return [Q.valuation(c) for c in self.exact]


# ---------------------------------------------------------------------------
# exponential factors in the staging field
# ---------------------------------------------------------------------------

def _exp_factor(Q: RamifiedQ, coef: Fraction, step: int, D: int):
    """``exp(pi * coef * x^step)`` up to degree ``D`` in ``Q(pi)``."""
    out = [Q.zero] * (D + 1)
    k = 0
    while step * k <= D:
        c = coef ** k / math.factorial(k)
        out[step * k] = Q.scale(c, Q.pi_power(k))
        k += 1
    return out


def _series_mul(Q: RamifiedQ, a, b, D: int):
    out = [Q.zero] * (D + 1)
    for i in range(D + 1):
        if Q.is_zero(a[i]):
            continue
        for j in range(D + 1 - i):
            if not Q.is_zero(b[j]):
                out[i + j] = Q.add(out[i + j], Q.mul(a[i], b[j]))
    return out


def _check_theta_precision(p: int, N: int, D: int):
    if Fraction(D * (p - 1), p * p) >= N:
        raise PrecisionExhausted(
            f"cutoff D={D} needs more than N={N} digits at p={p} (D(p-1)/p^2 >= N)"
        )


def dwork_theta(ctx: FrobContext, D: int | None = None) -> TruncSeries:
    """Coefficients of ``exp(pi z - pi z^p)`` up to ``z^D``."""
    D = ctx.D if D is None else D
    _check_theta_precision(ctx.p, ctx.N, D)
    Q = ctx.staging
    exact = _series_mul(Q, _exp_factor(Q, Fraction(1), 1, D), _exp_factor(Q, Fraction(-1), ctx.p, D), D)
    R = ctx.ring
    return TruncSeries(R, D, tuple(Q.to_ring(R, c) for c in exact), 0, tuple(exact))


def overconvergence_slope(valuations: Sequence) -> Fraction:
    """Largest ``c`` with ``v(a_i) >= c i + v(a_0)`` over the computed range."""
    v0 = valuations[0]
    if v0 == math.inf:
        raise InputError("constant coefficient must be nonzero")
    best = None
    for i, v in enumerate(valuations):
        if i == 0 or v == math.inf:
            continue
        slope = Fraction(v - v0) / i
        best = slope if best is None else min(best, slope)
    if best is None:
        raise InputError("no nonzero coefficients beyond the constant term")
    return best


# ---------------------------------------------------------------------------
# Frobenius
# ---------------------------------------------------------------------------

def _integral_coefficients(f: Poly, p: int) -> dict:
    if f.nvars != 1:
        raise InputError("Frobenius is implemented for one variable only")
    if not isinstance(f.ring, (Integers, Rationals)):
        raise InputError(f"f must have integer or rational coefficients, got {f.ring}")
    out = {}
    for (k,), c in f.items():
        c = Fraction(c)
        if c.denominator % p == 0:
            raise DenominatorNotInvertible(f"coefficient {c} of f is not {p}-integral")
        if k > 0:
            out[k] = c
    return out


def correcting_factor_exact(ctx: FrobContext, f: Poly, D: int | None = None):
    """``exp(pi (f(x^p) - f(x)))`` up to ``x^D`` in the staging field."""
    D = ctx.D if D is None else D
    Q = ctx.staging
    series = [Q.one] + [Q.zero] * D
    for k, c in sorted(_integral_coefficients(f, ctx.p).items()):
        series = _series_mul(Q, series, _exp_factor(Q, c, k * ctx.p, D), D)
        series = _series_mul(Q, series, _exp_factor(Q, -c, k, D), D)
    return series


def _frobenius_exact(ctx: FrobContext, f: Poly, w: Sequence, D: int):
    """``w(x^p) p x^(p-1) E(x)`` in the staging field; ``w`` given as staging values."""
    Q, p = ctx.staging, ctx.p
    E = correcting_factor_exact(ctx, f, D)
    sub = [Q.zero] * (D + 1)
    for i, c in enumerate(w):
        k = p * i + p - 1
        if k <= D and not Q.is_zero(c):
            sub[k] = Q.scale(Fraction(p), c)
    return _series_mul(Q, sub, E, D)


def _as_staging(ctx: FrobContext, w):
    Q = ctx.staging
    out = []
    for c in w:
        if isinstance(c, tuple):
            out.append(tuple(Fraction(x) for x in c))
        else:
            out.append(Q.from_fraction(Fraction(c)))
    return out


def frobenius_apply(ctx: FrobContext, f: Poly, omega: Sequence, D: int | None = None) -> TruncSeries:
    """Image of the 1-form ``w(x) dx`` (``omega`` = coefficients of ``w``)."""
    D = ctx.D if D is None else D
    _check_theta_precision(ctx.p, ctx.N, D)
    exact = _frobenius_exact(ctx, f, _as_staging(ctx, omega), D)
    R, Q = ctx.ring, ctx.staging
    return TruncSeries(R, D, tuple(Q.to_ring(R, c) for c in exact), 0, tuple(exact))


def frobenius_zero_form(ctx: FrobContext, f: Poly, eta: Sequence, D: int | None = None):
    """``eta(x^p) E(x)`` in the staging field."""
    D = ctx.D if D is None else D
    Q, p = ctx.staging, ctx.p
    E = correcting_factor_exact(ctx, f, D)
    sub = [Q.zero] * (D + 1)
    for i, c in enumerate(_as_staging(ctx, eta)):
        if p * i <= D:
            sub[p * i] = c
    return _series_mul(Q, sub, E, D)


def _twisted_d_exact(ctx: FrobContext, f: Poly, h: Sequence, D: int):
    """Coefficients of ``(h' + pi f' h) dx`` in the staging field, up to ``x^D``."""
    Q = ctx.staging
    out = [Q.zero] * (D + 1)
    for i in range(1, len(h)):
        if i - 1 <= D:
            out[i - 1] = Q.add(out[i - 1], Q.scale(Fraction(i), h[i]))
    pi = Q.pi_power(1)
    for (k,), c in f.diff(0).items():
        c = Fraction(c)
        for i, hi in enumerate(h):
            if i + k <= D and not Q.is_zero(hi):
                out[i + k] = Q.add(out[i + k], Q.scale(c, Q.mul(pi, hi)))
    return out


@dataclass
class ResidualReport:
    valuation: object
    compared_degree: int
    horizon: int
    ok: bool


def chain_map_residual(ctx: FrobContext, f: Poly, eta: Sequence) -> ResidualReport:
    """Compare ``Psi(d_{pi f} eta)`` with ``d_{pi f}(Psi eta)`` modulo ``p^N``.

    Both sides agree exactly before truncation; truncating ``E`` at ``x^D``
    only spoils degrees above ``D - max(1, deg f - 1)``, so the comparison
    stops there.
    """
    D = ctx.D
    _check_theta_precision(ctx.p, ctx.N, D)
    Q, R = ctx.staging, ctx.ring
    deg_f = max(int(f.degree()), 1) if not f.is_zero() else 1
    top = D - max(1, deg_f - 1)
    eta_q = _as_staging(ctx, eta)
    left = _frobenius_exact(ctx, f, _twisted_d_exact(ctx, f, eta_q, D), D)
    psi_eta = frobenius_zero_form(ctx, f, eta_q, D)
    right = _twisted_d_exact(ctx, f, psi_eta, D)
    worst = math.inf
    for k in range(top + 1):
        diff = Q.to_ring(R, Q.sub(left[k], right[k]))
        worst = min(worst, R.valuation(diff))
    return ResidualReport(worst, top, R.N, worst >= R.N)


# ---------------------------------------------------------------------------
# eigenvalue on a one-dimensional cohomology
# ---------------------------------------------------------------------------

def pi_adic_digits(R: PiAdic, a, count: int) -> list[int]:
    """Digits ``d_j`` in ``{0..p-1}`` with ``a = sum d_j pi^j`` (first ``count``)."""
    p, m = R.p, R.modulus
    cur = list(a)
    digits = []
    for _ in range(count):
        digit = cur[0] % p
        digits.append(digit)
        cur[0] = (cur[0] - digit) % m
        # divide by pi: (c_0 + c_1 pi + ...)/pi with p | c_0
        c0 = cur[0] // p
        cur = cur[1:] + [(-c0) % m]
    return digits


@dataclass
class FrobeniusResult:
    alpha: tuple  # payload in PiAdic(p, precision)
    ring: PiAdic
    valuation: Fraction
    horizon: Fraction
    loss: int
    truncation_bound: Fraction
    alpha_squared_residual_valuation: object
    precision_ok: bool
    digits: list

    def alpha_squared_mod(self) -> str:
        """Symmetric residue of the constant coefficient of ``alpha^2``."""
        R = self.ring
        sq = R.mul(self.alpha, self.alpha)
        k = max(int(math.floor(self.horizon + self.valuation)), 1)
        mod = R.p ** min(k, R.N)
        c = sq[0] % mod
        if c > mod // 2:
            c -= mod
        return str(c)


def _reduction_chain(Q: RamifiedQ, a: Fraction, b: Fraction, upto: int):
    """``r_k`` with ``[x^k dx] = r_k [dx]`` in ``H_{pi f}``, ``f = a x^2 + b x``."""
    r = [Q.one, Q.from_fraction(-b / (2 * a))]
    pi = Q.pi_power(1)
    for k in range(1, upto):
        num = Q.add(Q.scale(Fraction(k), r[k - 1]), Q.scale(b, Q.mul(pi, r[k])))
        r.append(Q.scale(-1 / (2 * a), Q.inv_pi(num)))
    return r


def frobenius_eigenvalue(ctx: FrobContext, f: Poly) -> FrobeniusResult:
    """Scalar of Frobenius on ``H_{pi f}`` when that space is spanned by ``[dx]``."""
    coeffs = _integral_coefficients(f, ctx.p)
    fq = f if isinstance(f.ring, Rationals) else f.base_change(RingHom(f.ring, Rationals()))
    try:
        mu = milnor_basis(fq).mu
    except NotZeroDimensional:
        mu = None
    if mu != 1:
        raise MilnorMismatch(f"Milnor number of f is {mu}, the eigenvalue needs exactly 1")
    a, b = coeffs.get(2, Fraction(0)), coeffs.get(1, Fraction(0))
    if a == 0 or _vp(2 * a, ctx.p) != 0:
        raise MilnorMismatch("the quadratic coefficient must be a p-adic unit")
    p, N, D = ctx.p, ctx.N, ctx.D
    _check_theta_precision(p, N, D)
    Q, R = ctx.staging, ctx.ring
    psi = frobenius_apply(ctx, f, [1], D)
    r = _reduction_chain(Q, a, b, 4 * D + 1)
    # tail estimate from the overconvergence bound of the correcting factor
    slope = Fraction(p - 1, 2 * p * p)
    tail = min(
        1 + slope * (k - (p - 1)) + Q.valuation(r[k])
        for k in range(D + 1, 4 * D + 1)
        if Q.valuation(r[k]) != math.inf
    )
    e = max(Q.denominator_exponent(r[k]) for k in range(D + 1))
    if e >= N:
        raise PrecisionExhausted(f"reduction needs {e} extra digits but only N={N} are available")
    scale = Fraction(p**e)
    beta = R.zero
    for k in range(D + 1):
        if R.is_zero(psi.coeffs[k]):
            continue
        beta = R.add(beta, R.mul(psi.coeffs[k], Q.to_ring(R, Q.scale(scale, r[k]))))
    if any(c % p**e for c in beta):
        raise ReductionDiverged("truncated reduction is not integral; increase D")
    prec = N - e
    R2 = PiAdic(p, prec)
    alpha = tuple((c // p**e) % R2.modulus for c in beta)
    horizon = min(Fraction(prec), tail)
    v = R2.valuation(alpha)
    if tail <= 0 or v == math.inf or v >= horizon:
        raise ReductionDiverged(f"eigenvalue not resolved: valuation {v}, horizon {horizon}")
    pstar = R2.from_int((-1) ** ((p - 1) // 2) * p)
    resid = R2.valuation(R2.sub(R2.mul(alpha, alpha), pstar))
    ok = resid >= horizon + v
    digits = pi_adic_digits(R2, alpha, int(horizon * (p - 1)))
    return FrobeniusResult(alpha, R2, v, horizon, e, tail, resid, ok, digits)

"""Normalized perturbative integrals for ``f = x^T A x / 2 + lambda * V``.

The functional ``I`` is pinned down by ``I(1) = 1`` and by vanishing on every
``d_a h + (d_a f) h``.  Writing a monomial as ``x_k g'`` and solving that
relation for ``I(x_k g')`` gives the rewriting rule used here::

    I(x_k g') = - sum_a Ainv[k][a] * ( I(d_a g') + lambda * I((d_a V) g') )

Each step either lowers the x-degree by two or raises the lambda order, so the
recursion is finite once the lambda order is truncated at ``N``.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InputError, NonTerminating, NotClosed, SpecMismatch, TorsionRing
from .forms import Form, de_rham_d
from .linalg import identity, inverse, is_symmetric, mat_mul
from .poly import Poly
from .rings import (
    Integers,
    Rationals,
    Ring,
    RingHom,
    TruncatedSeries,
)

LAMBDA = "lambda"


@dataclass(frozen=True)
class LambdaSeries:
    """An element of ``K[lambda]/(lambda^N)``."""

    base: Ring
    order: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.order:
            raise ValueError(f"expected {self.order} coefficients, got {len(self.coeffs)}")

    @property
    def ring(self) -> TruncatedSeries:
        return TruncatedSeries(self.base, LAMBDA, self.order)

    @classmethod
    def from_payload(cls, ring: TruncatedSeries, payload):
        return cls(ring.base, ring.order, tuple(payload))

    @classmethod
    def constant(cls, base: Ring, order: int, c=1):
        S = TruncatedSeries(base, LAMBDA, order)
        return cls.from_payload(S, S.convert(c))

    def _other(self, other):
        if not isinstance(other, LambdaSeries):
            return NotImplemented
        if (self.base, self.order) != (other.base, other.order):
            raise SpecMismatch(f"series over {self.ring} and {other.ring}")
        return other

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return LambdaSeries(self.base, self.order, self.ring.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return LambdaSeries(self.base, self.order, self.ring.sub(self.coeffs, other.coeffs))

    def __neg__(self):
        return LambdaSeries(self.base, self.order, self.ring.neg(self.coeffs))

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return LambdaSeries(self.base, self.order, self.ring.mul(self.coeffs, other.coeffs))

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.coeffs)

    def base_change(self, h: RingHom) -> LambdaSeries:
        if h.domain != self.base:
            raise SpecMismatch(f"hom from {h.domain} applied to series over {self.base}")
        return LambdaSeries(h.codomain, self.order, tuple(h.apply(c) for c in self.coeffs))

    def strings(self) -> list[str]:
        return [self.base.fmt(c) for c in self.coeffs]

    def __str__(self):
        return self.ring.fmt(self.coeffs)


def _check_base(ring: Ring, allow_torsion: bool):
    if isinstance(ring, TruncatedSeries):
        raise InputError("the base ring K must not itself be a truncated series ring")
    if not ring.torsion_free and not allow_torsion:
        raise TorsionRing(
            f"normalized integrals are only defined over torsion-free rings, got {ring}"
        )


class GaussianProblem:
    """``f = x^T A x / 2 + lambda V`` over a base ring ``K``, truncated at ``lambda^order``.

    ``V`` may be a polynomial or a closed 1-form ``dV``.  ``allow_torsion`` is
    only meant for base changes of problems defined over a torsion-free ring.
    """

    def __init__(
        self,
        ring: Ring,
        A: Sequence[Sequence],
        V: Poly | Form | None = None,
        order: int = 1,
        *,
        allow_torsion: bool = False,
    ):
        _check_base(ring, allow_torsion)
        if not isinstance(order, int) or order < 1:
            raise InputError(f"lambda order must be a positive integer, got {order!r}")
        n = len(A)
        if n == 0 or any(len(row) != n for row in A):
            raise InputError("A must be a non-empty square matrix")
        self.ring = ring
        self.n = n
        self.order = order
        self.allow_torsion = allow_torsion
        self.A = [[ring.convert(a) for a in row] for row in A]
        if not is_symmetric(ring, self.A):
            raise InputError("A must be symmetric")
        self.Ainv = inverse(ring, self.A)
        if mat_mul(ring, self.A, self.Ainv) != identity(ring, n):
            raise ArithmeticError("matrix inverse failed verification")
        self.series_ring = TruncatedSeries(ring, LAMBDA, order)

        if V is None:
            V = Poly.zero(ring, n)
        if isinstance(V, Form):
            if V.ring != ring or V.nvars != n:
                raise SpecMismatch("dV must be a 1-form over the base ring in n variables")
            if V.degrees() - {1}:
                raise NotClosed("dV must be a 1-form")
            if not de_rham_d(V).is_zero():
                raise NotClosed("the supplied dV is not closed")
            self.V = None
            self.dV = [V.coefficient((a,)) for a in range(n)]
        else:
            if V.ring != ring or V.nvars != n:
                raise SpecMismatch(f"V must be a polynomial over {ring} in {n} variables")
            c0 = V.constant_term()
            if not ring.is_zero(c0):
                warnings.warn("dropping the constant term of V; only dV enters the integral")
                V = V - Poly(ring, n, {(0,) * n: c0})
            self.V = V
            self.dV = [V.diff(a) for a in range(n)]

    @property
    def deg_V(self) -> int:
        d = max((p.degree() for p in self.dV), default=-math.inf)
        return 0 if d == -math.inf else int(d) + 1

    def df(self, a: int) -> Poly:
        """``d_a f`` as a polynomial over ``K[lambda]/(lambda^N)``."""
        S = self.series_ring
        out = {}
        for b in range(self.n):
            if not self.ring.is_zero(self.A[a][b]):
                e = [0] * self.n
                e[b] = 1
                out[tuple(e)] = S.constant(self.A[a][b])
        lam = S.gen()
        for e, c in self.dV[a].items():
            term = S.scale(c, lam)
            out[e] = S.add(out[e], term) if e in out else term
        return Poly(S, self.n, out)

    def lift(self, g: Poly) -> Poly:
        """Coerce ``g`` into a polynomial over ``K[lambda]/(lambda^N)``."""
        S = self.series_ring
        if g.nvars != self.n:
            raise InputError(f"g has {g.nvars} variables, the problem has {self.n}")
        if g.ring == S:
            return g
        return g.base_change(RingHom(g.ring, S))


def _step_bound(P: GaussianProblem, g_degree: int) -> int:
    # Every memo miss is a distinct (monomial, order) pair, so this bounds the work.
    top = g_degree + (P.order - 1) * max(P.deg_V - 2, 0) + 1
    return (P.order + 1) * math.comb(P.n + top, P.n) + 16


class _Integrator:
    def __init__(self, P: GaussianProblem, strategy: str, rng: random.Random | None, max_steps: int):
        if strategy not in ("leftmost", "random"):
            raise InputError(f"unknown pivot strategy {strategy!r}")
        self.P = P
        self.K = P.ring
        self.strategy = strategy
        self.rng = rng or random.Random(0)
        self.max_steps = max_steps
        self.steps = 0
        self.memo: dict = {}

    def series(self, r: int):
        return TruncatedSeries(self.K, LAMBDA, r)

    def mono(self, e: tuple, r: int):
        """``I(x^e)`` truncated to ``lambda^r`` as a coefficient tuple of length ``r``."""
        key = (e, r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        K = self.K
        if not any(e):
            value = (K.one,) + (K.zero,) * (r - 1)
            self.memo[key] = value
            return value
        self.steps += 1
        if self.steps > self.max_steps:
            raise NonTerminating(f"rewriting exceeded {self.max_steps} steps")
        live = [i for i, k in enumerate(e) if k]
        k = live[0] if self.strategy == "leftmost" else self.rng.choice(live)
        rest = list(e)
        rest[k] -= 1
        rest = tuple(rest)
        acc = [K.zero] * r
        for a in range(self.P.n):
            w = self.P.Ainv[k][a]
            if K.is_zero(w):
                continue
            inner = [K.zero] * r
            if rest[a]:
                d = list(rest)
                d[a] -= 1
                sub = self.mono(tuple(d), r)
                m = K.from_int(rest[a])
                inner = [K.add(x, K.mul(m, y)) for x, y in zip(inner, sub)]
            if r > 1:
                for ev, c in self.P.dV[a].items():
                    prod = tuple(x + y for x, y in zip(ev, rest))
                    sub = self.mono(prod, r - 1)
                    for j in range(r - 1):
                        inner[j + 1] = K.add(inner[j + 1], K.mul(c, sub[j]))
            acc = [K.sub(x, K.mul(w, y)) for x, y in zip(acc, inner)]
        value = tuple(acc)
        self.memo[key] = value
        return value


def integrate(
    P: GaussianProblem,
    g: Poly,
    *,
    strategy: str = "leftmost",
    seed: int | None = None,
    max_steps: int | None = None,
    stats: dict | None = None,
) -> LambdaSeries:
    """The normalized integral ``I(g)`` in ``K[lambda]/(lambda^N)``.

    ``strategy`` chooses which variable to peel off a monomial (``"leftmost"``
    or ``"random"`` with ``seed``); the answer does not depend on it.
    """
    _check_base(P.ring, P.allow_torsion)
    G = P.lift(g)
    S = P.series_ring
    deg = 0 if G.is_zero() else int(G.degree())
    bound = max_steps if max_steps is not None else _step_bound(P, deg)
    worker = _Integrator(P, strategy, random.Random(seed), bound)
    total = S.zero
    for e, c in G.sorted_terms(descending=False):
        total = S.add(total, S.mul(c, worker.mono(e, P.order)))
    if stats is not None:
        stats["steps"] = worker.steps
        stats["bound"] = bound
    return LambdaSeries.from_payload(S, total)


def check_vanishing(P: GaussianProblem, h: Poly, a: int) -> LambdaSeries:
    """``I(d_a h + (d_a f) h)``; zero by construction of ``I``."""
    if not 0 <= a < P.n:
        raise InputError(f"variable index {a} out of range")
    H = P.lift(h)
    return integrate(P, H.diff(a) + P.df(a) * H)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def wick_oracle(ring: Ring, A: Sequence[Sequence], e: Sequence[int]):
    """Sum over perfect matchings of the indices of ``x^e`` of products of ``-Ainv``."""
    Ainv = inverse(ring, [[ring.convert(a) for a in row] for row in A])
    n = len(Ainv)
    prop = [[ring.neg(Ainv[i][j]) for j in range(n)] for i in range(n)]

    @lru_cache(maxsize=None)
    def pairings(counts: tuple):
        if not any(counts):
            return ring.one
        i = next(k for k, c in enumerate(counts) if c)
        rest = list(counts)
        rest[i] -= 1
        total = ring.zero
        for j in range(n):
            if rest[j] == 0:
                continue
            left = list(rest)
            left[j] -= 1
            term = ring.mul(ring.from_int(rest[j]), ring.mul(prop[i][j], pairings(tuple(left))))
            total = ring.add(total, term)
        return total

    if sum(e) % 2:
        return ring.zero
    return pairings(tuple(e))


def moment_ratio_oracle(ring: Ring, A, V: Poly, g: Poly, order: int) -> list:
    """``<g exp(lambda V)> / <exp(lambda V)>`` over a field, moments by matchings.

    Independent of the rewriting: expands ``exp(lambda V)`` to ``lambda^(order-1)``
    and evaluates every Gaussian moment with :func:`wick_oracle`.
    """
    if not ring.is_field:
        raise InputError("the moment-ratio oracle needs a field")
    n = len(A)

    def moment(p: Poly):
        return ring.sum(ring.mul(c, wick_oracle(ring, A, e)) for e, c in p.items())

    Vk = Poly.const(ring, n, 1)
    num, den = [], []
    for k in range(order):
        w = ring.from_fraction(Fraction(1, math.factorial(k)))
        num.append(ring.mul(w, moment(g * Vk)))
        den.append(ring.mul(w, moment(Vk)))
        Vk = Vk * V
    S = TruncatedSeries(ring, LAMBDA, order)
    return list(S.mul(tuple(num), S.inv(tuple(den))))


# ---------------------------------------------------------------------------
# integrality and base change
# ---------------------------------------------------------------------------

@dataclass
class IntegralityReport:
    coefficients: list
    integral: bool
    matches_rational: bool
    steps: int = 0
    notes: list = field(default_factory=list)


def integrality_report(P: GaussianProblem, g: Poly) -> IntegralityReport:
    """Integrate over the integers and cross-check against the rational run."""
    if not isinstance(P.ring, Integers):
        raise InputError(f"integrality report needs an integer problem, got {P.ring}")
    stats: dict = {}
    over_z = integrate(P, g, stats=stats)
    to_q = RingHom(Integers(), Rationals())
    PQ = base_change_problem(P, to_q)
    over_q = integrate(PQ, g.base_change(to_q))
    integral = all(Fraction(c).denominator == 1 for c in over_q.coeffs)
    matches = over_z.base_change(to_q) == over_q
    return IntegralityReport(
        coefficients=list(over_z.coeffs),
        integral=integral,
        matches_rational=matches,
        steps=stats["steps"],
    )


def base_change_problem(P: GaussianProblem, h: RingHom) -> GaussianProblem:
    """Push a problem along ``h : K -> K'``.

    Torsion targets are allowed here: only top-degree classes enter and those
    commute with base change.
    """
    if h.domain != P.ring:
        raise SpecMismatch(f"hom from {h.domain} applied to problem over {P.ring}")
    K2 = h.codomain
    A2 = [[h.apply(a) for a in row] for row in P.A]
    if P.V is not None:
        V2 = P.V.base_change(h)
    else:
        V2 = Form(K2, P.n, {(a,): P.dV[a].base_change(h) for a in range(P.n)})
    return GaussianProblem(K2, A2, V2, P.order, allow_torsion=True)

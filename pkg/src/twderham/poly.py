"""Sparse multivariate polynomials over an exact coefficient ring.

A :class:`Poly` maps exponent tuples (length ``nvars``) to nonzero ring
payloads.  Values are immutable; every operation returns a new polynomial.
Iteration and display use degree-reverse-lexicographic order (``x1 > x2 >
...``), the single monomial order used throughout the package.
"""

from __future__ import annotations

import math
from fractions import Fraction
from operator import add as _add
from typing import Iterable, Sequence

from .errors import SpecMismatch
from .rings import Ring, RingElement, RingHom

Exponent = tuple[int, ...]


def degrevlex_key(e: Exponent):
    """Sort key: larger key means larger monomial in degrevlex."""
    return (sum(e), tuple(-x for x in reversed(e)))


def monomial_divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_str(e: Exponent, names: Sequence[str] | None = None) -> str:
    names = names or [f"x{i + 1}" for i in range(len(e))]
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) if parts else "1"


def monomials_up_to(nvars: int, degree: int) -> list[Exponent]:
    """All exponent vectors of total degree <= ``degree``, degrevlex ascending."""
    out: list[Exponent] = []

    def rec(prefix, left, remaining):
        if left == 1:
            for k in range(remaining + 1):
                out.append(prefix + (k,))
            return
        for k in range(remaining + 1):
            rec(prefix + (k,), left - 1, remaining - k)

    if nvars == 0:
        return [()]
    rec((), nvars, degree)
    out.sort(key=degrevlex_key)
    return out


class Poly:
    __slots__ = ("ring", "nvars", "terms", "_hash")

    def __init__(self, ring: Ring, nvars: int, terms=None, *, canonical=False):
        self.ring = ring
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif canonical:
            self.terms = terms
        else:
            iz = ring.is_zero
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars or any(k < 0 for k in e):
                    raise ValueError(f"bad exponent {e} for {nvars} variables")
                if not iz(c):
                    clean[e] = c
            self.terms = clean
        self._hash = None

    # --- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars):
        return cls(ring, nvars, {}, canonical=True)

    @classmethod
    def const(cls, ring, nvars, c=1):
        payload = ring.convert(c)
        if ring.is_zero(payload):
            return cls.zero(ring, nvars)
        return cls(ring, nvars, {(0,) * nvars: payload}, canonical=True)

    @classmethod
    def var(cls, ring, nvars, i):
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls(ring, nvars, {tuple(e): ring.one}, canonical=True)

    @classmethod
    def monomial(cls, ring, nvars, e, c=1):
        payload = ring.convert(c)
        if ring.is_zero(payload):
            return cls.zero(ring, nvars)
        return cls(ring, nvars, {tuple(e): payload}, canonical=True)

    # --- basic protocol ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.ring.zero)

    def coeff(self, e):
        return self.terms.get(tuple(e), self.ring.zero)

    def items(self):
        return self.terms.items()

    def degree(self):
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self.terms:
            return -math.inf
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int):
        if not self.terms:
            return -math.inf
        return max(e[i] for e in self.terms)

    def sorted_terms(self, descending=True):
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=descending)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=degrevlex_key)
        return e, self.terms[e]

    def leading_monomial(self) -> Exponent:
        return self.leading_term()[0]

    # --- arithmetic -------------------------------------------------------
    def _check(self, other: Poly):
        if self.ring != other.ring or self.nvars != other.nvars:
            raise SpecMismatch(
                f"polynomials over {self.ring}/{self.nvars} vars and {other.ring}/{other.nvars} vars"
            )

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise SpecMismatch(f"{self.ring} vs {other.ring}")
            return Poly.const(self.ring, self.nvars, other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(self.ring, self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        if len(self.terms) < len(other.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = ring.add(prev, c)
                if ring.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
        return Poly(ring, self.nvars, out, canonical=True)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ring.neg
        return Poly(self.ring, self.nvars, {e: neg(c) for e, c in self.terms.items()}, canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        if not self.terms or not other.terms:
            return Poly.zero(ring, self.nvars)
        if len(other.terms) == 1:
            (e2, c2), = other.terms.items()
            return self.mul_term(e2, c2)
        if len(self.terms) == 1:
            (e1, c1), = self.terms.items()
            return other.mul_term(e1, c1)
        add, mul, iz = ring.add, ring.mul, ring.is_zero
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(_add, e1, e2))
                c = mul(c1, c2)
                prev = out.get(e)
                out[e] = c if prev is None else add(prev, c)
        return Poly(ring, self.nvars, {e: c for e, c in out.items() if not iz(c)}, canonical=True)

    __rmul__ = __mul__

    def mul_term(self, e, c):
        """Multiply by the single term ``c * x**e`` (``c`` a payload)."""
        ring = self.ring
        if ring.is_zero(c):
            return Poly.zero(ring, self.nvars)
        mul, iz = ring.mul, ring.is_zero
        out = {}
        for e1, c1 in self.terms.items():
            v = mul(c1, c)
            if not iz(v):
                out[tuple(map(_add, e1, e))] = v
        return Poly(ring, self.nvars, out, canonical=True)

    def scale(self, c):
        """Multiply by a ring payload."""
        return self.mul_term((0,) * self.nvars, c)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of polynomials are not polynomials")
        result = Poly.const(self.ring, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # --- calculus and substitution ----------------------------------------
    def diff(self, i: int) -> Poly:
        ring = self.ring
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k == 0:
                continue
            v = ring.mul(ring.from_int(k), c)
            if ring.is_zero(v):
                continue
            e2 = list(e)
            e2[i] = k - 1
            out[tuple(e2)] = v
        return Poly(ring, self.nvars, out, canonical=True)

    def gradient(self) -> list[Poly]:
        return [self.diff(i) for i in range(self.nvars)]

    def compose(self, subs: Sequence[Poly]) -> Poly:
        """Substitute ``x_i -> subs[i]``; the result lives in ``subs``' variables."""
        if len(subs) != self.nvars:
            raise ValueError(f"need {self.nvars} substitutions, got {len(subs)}")
        if not subs:
            raise ValueError("cannot compose a polynomial in zero variables")
        target = subs[0]
        for s in subs:
            if s.ring != self.ring or s.nvars != target.nvars:
                raise SpecMismatch("substitution polynomials disagree on ring/variables")
        powers: list[dict[int, Poly]] = [{0: Poly.const(self.ring, target.nvars, 1)} for _ in subs]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * subs[i]
            return cache[k]

        acc = Poly.zero(self.ring, target.nvars)
        for e, c in self.terms.items():
            term = Poly.const(self.ring, target.nvars, 1).scale(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            acc = acc + term
        return acc

    def evaluate(self, point: Sequence):
        """Evaluate at a point given as ring payloads."""
        ring = self.ring
        acc = ring.zero
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = ring.mul(v, ring.pow(x, k))
            acc = ring.add(acc, v)
        return acc

    def map_coeffs(self, fn, ring: Ring) -> Poly:
        iz = ring.is_zero
        out = {}
        for e, c in self.terms.items():
            v = fn(c)
            if not iz(v):
                out[e] = v
        return Poly(ring, self.nvars, out, canonical=True)

    def base_change(self, h: RingHom) -> Poly:
        if h.domain != self.ring:
            raise SpecMismatch(f"hom from {h.domain} applied to polynomial over {self.ring}")
        return self.map_coeffs(h.apply, h.codomain)

    def embed(self, nvars: int, positions: Sequence[int]) -> Poly:
        """Rename variable ``i`` to ``positions[i]`` in a ring with ``nvars`` variables."""
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            for i, k in enumerate(e):
                e2[positions[i]] += k
            out[tuple(e2)] = c
        return Poly(self.ring, nvars, out, canonical=True)

    # --- display ----------------------------------------------------------
    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        ring = self.ring
        pieces = []
        for e, c in self.sorted_terms():
            mono = monomial_str(e, names)
            cs = ring.fmt(c)
            paren = ring.needs_parens(c)
            if mono == "1":
                body = f"({cs})" if paren else cs
            elif ring.is_one(c):
                body = mono
            elif not paren and cs.startswith("-") and ring.is_one(ring.neg(c)):
                body = "-" + mono
            else:
                body = f"({cs})*{mono}" if paren else f"{cs}*{mono}"
            pieces.append(body)
        out = pieces[0]
        for body in pieces[1:]:
            if body.startswith("-"):
                out += " - " + body[1:]
            else:
                out += " + " + body
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Poly({self.ring}, {self.nvars}, {self.format()!r})"


def poly_from_terms(ring: Ring, nvars: int, terms: Iterable[tuple[Exponent, object]]) -> Poly:
    """Build a polynomial from (exponent, value) pairs, converting values."""
    out: dict = {}
    for e, c in terms:
        v = ring.convert(c)
        e = tuple(e)
        out[e] = ring.add(out[e], v) if e in out else v
    return Poly(ring, nvars, out)

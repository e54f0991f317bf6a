"""One-parameter families ``f(x, lambda)`` on a fixed affine space.

Classes ``[g dx]`` are reduced over the field ``Q(lambda)``.  Differentiating
along the parameter acts on a representative as ``g -> d_lambda g + (d_lambda f) g``;
iterating this on a seed class and looking for the first linear dependence
gives a Picard-Fuchs operator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import GenericityFailure, NoDependence, NotZeroDimensional
from .forms import Form, TwistedComplex, interior, lie_derivative, twisted_d
from .linalg import solve
from .milnor import MilnorData, milnor_basis, reduce_nform
from .parse import parse_poly, used_x_variables, x_names
from .poly import Poly
from .rings import (
    RationalFunctions,
    Rationals,
    RingHom,
    up_divmod,
    up_format,
    up_gcd,
    up_mul,
    up_strip,
)

FIELD = RationalFunctions("lambda")


def lambda_derivative(p: Poly) -> Poly:
    """Coefficientwise derivative in the parameter."""
    return p.map_coeffs(FIELD.derivative, FIELD)


def specialize(p: Poly, value: Fraction) -> Poly:
    """Substitute a rational value for the parameter."""
    return p.map_coeffs(lambda c: FIELD.evaluate(c, value), Rationals())


class FamilyProblem:
    """``f`` over ``Q(lambda)`` with a constant Milnor number on a generic fiber.

    Genericity is tested by specializing at ``samples`` random rational values
    of the parameter and comparing Milnor numbers with the generic fiber.
    """

    def __init__(self, f: Poly, *, samples: int = 3, seed: int = 0):
        if f.ring != FIELD:
            f = f.base_change(RingHom(f.ring, FIELD))
        self.f = f
        self.n = f.nvars
        try:
            self.milnor: MilnorData = milnor_basis(f)
        except NotZeroDimensional as exc:
            raise GenericityFailure(f"generic fiber has non-isolated critical points: {exc}") from exc
        rng = random.Random(seed)
        self.sampled: list[tuple[Fraction, int]] = []
        tries = 0
        while len(self.sampled) < samples:
            tries += 1
            if tries > 50 * samples:
                raise GenericityFailure("could not find regular parameter values to sample")
            value = Fraction(rng.randint(-97, 97), rng.randint(1, 13))
            try:
                fiber = specialize(f, value)
            except ZeroDivisionError:
                continue
            try:
                mu = milnor_basis(fiber).mu
            except NotZeroDimensional:
                mu = None
            self.sampled.append((value, mu))
        bad = [(v, m) for v, m in self.sampled if m != self.milnor.mu]
        if bad:
            raise GenericityFailure(
                f"Milnor number {self.milnor.mu} of the generic fiber differs at lambda = "
                + ", ".join(f"{v} (mu={m})" for v, m in bad)
            )

    @classmethod
    def parse(cls, text: str, nvars: int | None = None, **kw):
        n = nvars or max(used_x_variables(text), 1)
        return cls(parse_poly(text, FIELD, x_names(n), "lambda"), **kw)

    @property
    def mu(self) -> int:
        return self.milnor.mu

    @property
    def basis(self):
        return self.milnor.basis

    def representative(self, coords: Sequence) -> Poly:
        return Poly(FIELD, self.n, {b: c if isinstance(c, tuple) else FIELD.convert(c) for b, c in zip(self.basis, coords)})

    def coordinates(self, g: Poly) -> list:
        return reduce_nform(self.milnor, g).coords


def gm_connection_apply(F: FamilyProblem, c: Sequence | Poly) -> list:
    """Coordinates of ``nabla [g dx] = [(d_lambda g + (d_lambda f) g) dx]``.

    ``c`` is either a coordinate vector in the generic Milnor basis or a
    representative polynomial ``g``.
    """
    g = c if isinstance(c, Poly) else F.representative(c)
    if g.ring != FIELD:
        g = g.base_change(RingHom(g.ring, FIELD))
    return F.coordinates(lambda_derivative(g) + lambda_derivative(F.f) * g)


@dataclass
class PicardFuchsOperator:
    """``sum_i p_i(lambda) d^i`` with polynomial coefficients, lowest order first."""

    coefficients: list  # each a tuple of Fractions (ascending powers of lambda)
    chain: list = field(default_factory=list, repr=False)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def strings(self, var: str = "lambda") -> list[str]:
        return [up_format(p, var) for p in self.coefficients]

    def __str__(self):
        parts = []
        for i, p in enumerate(self.coefficients):
            if not p:
                continue
            ps = up_format(p, "lambda")
            op = "" if i == 0 else ("D" if i == 1 else f"D^{i}")
            parts.append(f"({ps})*{op}" if op else f"({ps})")
        return " + ".join(parts) or "0"


def _normalize(coeffs: list):
    """Clear denominators, remove polynomial and integer content, sign-normalize."""
    nums = list(coeffs)
    den_lcm = (Fraction(1),)
    for num, den in nums:
        g = up_gcd(den_lcm, den)
        den_lcm = up_strip(up_mul(den_lcm, up_divmod(den, g)[0]))
    polys = []
    for num, den in nums:
        polys.append(up_strip(up_mul(num, up_divmod(den_lcm, den)[0])))
    common = ()
    for p in polys:
        if p:
            common = p if not common else up_gcd(common, p)
    if common and len(common) > 1:
        polys = [up_divmod(p, common)[0] if p else p for p in polys]
    # integer content
    den = 1
    for p in polys:
        for c in p:
            den = lcm(den, Fraction(c).denominator)
    ints = [[int(Fraction(c) * den) for c in p] for p in polys]
    content = 0
    for p in ints:
        for c in p:
            content = gcd(content, c)
    content = content or 1
    ints = [[c // content for c in p] for p in ints]
    lead = next(p for p in reversed(ints) if any(p))
    if lead[-1] < 0:
        ints = [[-c for c in p] for p in ints]
    return [tuple(Fraction(c) for c in up_strip(p)) for p in ints]


def picard_fuchs(F: FamilyProblem, seed: Sequence | Poly) -> PicardFuchsOperator:
    """Minimal operator in ``d/dlambda`` annihilating the class of the seed."""
    g0 = seed if isinstance(seed, Poly) else F.representative(seed)
    if g0.ring != FIELD:
        g0 = g0.base_change(RingHom(g0.ring, FIELD))
    chain = [F.coordinates(g0)]
    mu = F.mu
    if all(FIELD.is_zero(c) for c in chain[0]):
        return PicardFuchsOperator([(Fraction(1),)], chain)
    for r in range(1, mu + 1):
        chain.append(gm_connection_apply(F, chain[-1]))
        cols = chain[:-1]
        M = [[v[b] for v in cols] for b in range(mu)]
        x = solve(FIELD, M, chain[-1])
        if x is None:
            continue
        coeffs = [FIELD.neg(xi) for xi in x] + [FIELD.one]
        normalized = _normalize(coeffs)
        op = PicardFuchsOperator(normalized, chain)
        if not operator_annihilates(op, chain):
            raise ArithmeticError("Picard-Fuchs postcondition failed")
        return op
    raise NoDependence(f"no dependence among the first {mu + 1} derivatives (mu = {mu})")


def operator_annihilates(op: PicardFuchsOperator, chain: Sequence[Sequence]) -> bool:
    """``sum_i p_i * nabla^i c_0`` has zero coordinates."""
    if len(chain) < len(op.coefficients):
        return False
    mu = len(chain[0])
    for b in range(mu):
        acc = FIELD.zero
        for p, v in zip(op.coefficients, chain):
            acc = FIELD.add(acc, FIELD.mul(FIELD.from_poly(p), v[b]))
        if not FIELD.is_zero(acc):
            return False
    return True


# ---------------------------------------------------------------------------
# vertical vector fields
# ---------------------------------------------------------------------------

@dataclass
class LiftReport:
    lhs: Form
    rhs: Form
    primitive: Form
    identity_holds: bool
    exact_on_closed: bool | None
    class_vanishes: bool | None


def lift_independence_check(F: FamilyProblem | Poly, eta: Sequence[Poly], omega: Form) -> LiftReport:
    """Check ``(L_eta + eta(f)) omega = d_f(i_eta omega) + i_eta(d_f omega)`` by expansion.

    The left side is computed from the Leibniz rule for ``L_eta``, independently
    of the contraction formula.  For a top-degree ``omega`` the reduced class
    of the left side is also checked to vanish.
    """
    f = F.f if isinstance(F, FamilyProblem) else F
    ring, n = f.ring, f.nvars
    eta = [e if e.ring == ring else e.base_change(RingHom(e.ring, ring)) for e in eta]
    if omega.ring != ring:
        omega = Form(ring, n, {s: p.base_change(RingHom(p.ring, ring)) for s, p in omega.components.items()})
    C = TwistedComplex(f=f)
    eta_f = Poly.zero(ring, n)
    for i in range(n):
        eta_f = eta_f + eta[i] * f.diff(i)
    lhs = lie_derivative(eta, omega) + omega.scale(eta_f)
    primitive = interior(eta, omega)
    d_omega = twisted_d(C, omega)
    rhs = twisted_d(C, primitive) + interior(eta, d_omega)
    holds = lhs == rhs
    exact = (lhs == twisted_d(C, primitive)) if d_omega.is_zero() else None
    vanishes = None
    if isinstance(F, FamilyProblem) and omega.degrees() <= {n} and holds:
        coords = F.coordinates(lhs.top_coefficient())
        vanishes = all(ring.is_zero(c) for c in coords)
    return LiftReport(lhs, rhs, primitive, holds, exact, vanishes)

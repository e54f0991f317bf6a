"""Constraint elimination by auxiliary variables.

A form on the hypersurface ``P = 0`` is sent to ``w ^ dP ^ dt`` in the
complex of ``f + t P`` on ``K^(n+1)``; with ``m`` constraints one adds
``t_1 .. t_m`` and wedges ``df_1 ^ dt_1 ^ ... ^ df_m ^ dt_m``.  The maps are
computed exactly and their chain-map property is certified by expansion.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .errors import FactorialNotInvertible, InputError, NotAUnit, NotZeroDimensional, SpecMismatch
from .forms import Form, TwistedComplex, exact_one_form, twisted_d, wedge
from .groebner import groebner
from .linalg import det
from .milnor import milnor_basis
from .poly import Poly


def _lift(p: Poly, nvars: int) -> Poly:
    return p.embed(nvars, list(range(p.nvars)))


def _lift_form(w: Form, nvars: int) -> Form:
    return w.embed(nvars, list(range(w.nvars)))


class ConstraintProblem:
    """Exponent ``f`` on ``K^n`` and constraints ``f_1 .. f_m``.

    Variables of the big space are ``x_1 .. x_n`` followed by ``t_1 .. t_m``.
    """

    def __init__(self, f: Poly | None, constraints: Sequence[Poly]):
        constraints = list(constraints)
        if not constraints:
            raise InputError("need at least one constraint")
        ring, n = constraints[0].ring, constraints[0].nvars
        if f is None:
            f = Poly.zero(ring, n)
        for p in [f] + constraints:
            if p.ring != ring or p.nvars != n:
                raise SpecMismatch("f and the constraints must share ring and variables")
        self.ring = ring
        self.n = n
        self.m = len(constraints)
        self.f = f
        self.constraints = constraints

    @property
    def total_vars(self) -> int:
        return self.n + self.m

    def t_index(self, i: int) -> int:
        return self.n + i

    def g_total(self) -> Poly:
        N = self.total_vars
        g = _lift(self.f, N)
        for i, p in enumerate(self.constraints):
            g = g + Poly.var(self.ring, N, self.t_index(i)) * _lift(p, N)
        return g

    def big_complex(self) -> TwistedComplex:
        return TwistedComplex(f=self.g_total())

    def small_complex(self) -> TwistedComplex:
        return TwistedComplex(f=self.f)


def _as_problem(P) -> ConstraintProblem:
    if isinstance(P, ConstraintProblem):
        return P
    if isinstance(P, Poly):
        return ConstraintProblem(None, [P])
    raise InputError(f"expected a constraint polynomial or problem, got {type(P).__name__}")


def codim_m_map(P: ConstraintProblem, omega: Form) -> Form:
    """``w ^ df_1 ^ dt_1 ^ ... ^ df_m ^ dt_m`` on ``K^(n+m)``."""
    P = _as_problem(P)
    if omega.ring != P.ring or omega.nvars != P.n:
        raise SpecMismatch("form does not live on the constraint problem's space")
    N = P.total_vars
    out = _lift_form(omega, N)
    for i, p in enumerate(P.constraints):
        out = wedge(out, exact_one_form(_lift(p, N)))
        out = wedge(out, Form.dx(P.ring, N, P.t_index(i)))
    allowed = {k + 2 * P.m for k in omega.degrees()}
    if not out.degrees() <= allowed:
        raise ArithmeticError("degree shift violated")
    return out


def delta_map(P, omega: Form) -> Form:
    """``w ^ dP ^ dt`` for a single constraint."""
    P = _as_problem(P)
    if P.m != 1:
        raise InputError("delta_map is for a single constraint; use codim_m_map")
    return codim_m_map(P, omega)


@dataclass
class ChainCertificate:
    lhs: Form
    rhs: Form
    alpha: Form
    correction: Form
    verified: bool
    correction_in_ideal: bool


def reduce_mod_constraint(P: Poly, omega: Form):
    """Split ``omega = red + P * alpha`` with coefficients of ``red`` reduced modulo ``P``."""
    if not P.ring.is_field or P.is_constant():
        return omega, Form(omega.ring, omega.nvars)
    gb = groebner([P])
    red, alpha = {}, {}
    for s, p in omega.components.items():
        quo, rem = gb.divide(p)
        q = gb.generator_cofactors(quo)[0]
        red[s], alpha[s] = rem, q
    return Form(omega.ring, omega.nvars, red), Form(omega.ring, omega.nvars, alpha)


def certify_delta_chain_map(P, omega: Form) -> ChainCertificate:
    """Check ``d_g(delta w) = delta(red(d_f w)) + delta(P alpha)`` term by term.

    ``red`` is the reduction of ``d_f w`` modulo ``P`` (the induced differential
    on forms restricted to the hypersurface) and ``alpha`` the explicit quotient.
    """
    P = _as_problem(P)
    if P.m != 1:
        raise InputError("chain-map certificate is for a single constraint")
    (c,) = P.constraints
    lhs = twisted_d(P.big_complex(), delta_map(P, omega))
    d_small = twisted_d(P.small_complex(), omega)
    red, alpha = reduce_mod_constraint(c, d_small)
    rhs = delta_map(P, red)
    correction = delta_map(P, alpha.scale(c))
    verified = lhs - rhs == correction
    N = P.total_vars
    cN = _lift(c, N)
    if P.ring.is_field and not c.is_constant():
        gb = groebner([cN])
        in_ideal = all(gb.contains(p) for p in correction.components.values())
    else:
        in_ideal = correction.is_zero()
    return ChainCertificate(lhs, rhs, alpha, correction, verified, in_ideal)


# ---------------------------------------------------------------------------
# the two intermediate maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentForm:
    """``numerator / P^pole`` in forms with ``P`` inverted, modulo regular forms."""

    numerator: Form
    pole: int


def residue_map(P: Poly, omega: Form) -> LaurentForm:
    """``w -> w ^ dP / P``."""
    return LaurentForm(wedge(omega, exact_one_form(P)), 1)


def pole_to_t(w: LaurentForm) -> Form:
    """``w / P^(i+1) -> (-1)^i w t^i / i! ^ dt`` on ``K^(n+1)``, ``t`` last."""
    i = w.pole - 1
    if i < 0:
        raise InputError("pole order must be at least 1")
    ring = w.numerator.ring
    n = w.numerator.nvars
    try:
        inv = ring.inv(ring.from_int(math.factorial(i)))
    except NotAUnit:
        raise FactorialNotInvertible(f"{i}! is not invertible in {ring}") from None
    coef = inv if i % 2 == 0 else ring.neg(inv)
    N = n + 1
    t_pow = Poly.monomial(ring, N, (0,) * n + (i,), 1).scale(coef)
    out = _lift_form(w.numerator, N).scale(t_pow)
    return wedge(out, Form.dx(ring, N, n))


def intermediate_maps(P: Poly, omega: Form, i: int):
    """Images of ``w`` under ``w -> w dP/P`` and of ``w / P^(i+1)`` under the t-map."""
    if i < 0:
        raise InputError("pole order index must be >= 0")
    return residue_map(P, omega), pole_to_t(LaurentForm(omega, i + 1))


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------

@dataclass
class RegularityReport:
    smooth: bool | None
    singular_points: list
    proxy_ok: bool
    mu: int | None
    status: str


def _jacobian_minors(P: ConstraintProblem):
    grads = [[p.diff(j) for j in range(P.n)] for p in P.constraints]
    minors = []
    for cols in itertools.combinations(range(P.n), P.m):
        sub = [[row[j] for j in cols] for row in grads]
        minors.append(_poly_det(sub))
    return minors


def _poly_det(M):
    k = len(M)
    if k == 1:
        return M[0][0]
    total = None
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _poly_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def regularity_report(P: ConstraintProblem, *, seed: int = 0, box: int = 3, samples: int = 200) -> RegularityReport:
    """Smoothness of ``{f_i = 0}`` and the isolated-critical-point proxy for ``g``.

    Smoothness is decided by whether the constraints and the maximal minors of
    their Jacobian generate the unit ideal; random integer points are also
    sampled to exhibit singular points when there are rational ones.
    """
    P = _as_problem(P)
    ring = P.ring
    rng = random.Random(seed)
    singular = []
    grads = [[p.diff(j) for j in range(P.n)] for p in P.constraints]
    for _ in range(samples):
        pt = [ring.from_int(rng.randint(-box, box)) for _ in range(P.n)]
        if not all(ring.is_zero(p.evaluate(pt)) for p in P.constraints):
            continue
        J = [[g.evaluate(pt) for g in row] for row in grads]
        full = False
        for cols in itertools.combinations(range(P.n), P.m):
            if not ring.is_zero(det(ring, [[row[j] for j in cols] for row in J])):
                full = True
                break
        if not full and pt not in singular:
            singular.append(pt)
    smooth = None
    if ring.is_field:
        gb = groebner(list(P.constraints) + _jacobian_minors(P))
        smooth = gb.is_unit_ideal()
    proxy_ok, mu = True, None
    try:
        mu = milnor_basis(P.g_total()).mu if ring.is_field else None
    except NotZeroDimensional:
        proxy_ok = False
    ok = proxy_ok and smooth is not False and not singular
    status = "isomorphism expected" if ok else "maps computed, isomorphism not guaranteed"
    return RegularityReport(smooth, [[ring.fmt(c) for c in p] for p in singular], proxy_ok, mu, status)

"""Independent reference computations used to derive frozen test values.

Nothing here imports the package's integration, reduction or Groebner code.
"""

from __future__ import annotations

import cmath
import itertools
from fractions import Fraction

import sympy as sp


def gaussian_moment_ratio_1d(V, g, order):
    """Coefficients of <g e^{lambda V}> / <e^{lambda V}> for the weight e^{-x^2/2}.

    Moments come from sympy's Gaussian integrals; the ratio is a formal series
    in lambda, truncated below lambda^order.
    """
    x, lam = sp.symbols("x lambda")
    weight = sp.exp(-x**2 / 2)
    norm = sp.integrate(weight, (x, -sp.oo, sp.oo))

    def moment(expr):
        poly = sp.Poly(sp.expand(expr), x)
        total = 0
        for (k,), c in poly.terms():
            total += c * sp.integrate(x**k * weight, (x, -sp.oo, sp.oo)) / norm
        return sp.simplify(total)

    expo = sum((lam * V(x)) ** k / sp.factorial(k) for k in range(order))
    num = sp.expand(sum(moment(g(x) * sp.expand(expo).coeff(lam, k)) * lam**k for k in range(order)))
    den = sp.expand(sum(moment(sp.expand(expo).coeff(lam, k)) * lam**k for k in range(order)))
    ratio = sp.series(num / den, lam, 0, order).removeO()
    return [Fraction(str(sp.nsimplify(ratio.coeff(lam, k)))) for k in range(order)]


def hafnian_moment(cov, exponents):
    """sum over perfect matchings of the expanded index list of products of cov entries."""
    idx = [i for i, e in enumerate(exponents) for _ in range(e)]
    if len(idx) % 2:
        return Fraction(0)

    def matchings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for j in range(len(rest)):
            for m in matchings(rest[:j] + rest[j + 1:]):
                yield [(first, rest[j])] + m

    total = Fraction(0)
    for m in matchings(idx):
        prod = Fraction(1)
        for a, b in m:
            prod *= cov[a][b]
        total += prod
    return total


def neg_inverse(A):
    M = sp.Matrix(A)
    inv = -M.inv()
    return [[Fraction(str(inv[i, j])) for j in range(M.cols)] for i in range(M.rows)]


def sympy_milnor(expr_text, nvars):
    """Milnor number and standard monomials from sympy's grevlex Groebner basis."""
    xs = sp.symbols(f"x1:{nvars + 1}")
    f = sp.sympify(expr_text, locals={str(v): v for v in xs})
    G = sp.groebner([sp.diff(f, v) for v in xs], *xs, order="grevlex")
    leads = [sp.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs]
    bound = max(max(m) for m in leads) + 1
    std = []
    for e in itertools.product(range(bound * nvars + 1), repeat=nvars):
        if not any(all(a >= b for a, b in zip(e, lm)) for lm in leads):
            std.append(e)
    return len(std), std


def gauss_sum_square(p):
    """(sum_x exp(2 pi i x^2 / p))^2, rounded to the nearest integer."""
    s = sum(cmath.exp(2j * cmath.pi * x * x / p) for x in range(p))
    sq = s * s
    assert abs(sq.imag) < 1e-9
    return round(sq.real)

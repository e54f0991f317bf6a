"""Top-degree twisted cohomology of a polynomial with isolated critical points.

For zero-dimensional Jacobian ideal the classes ``[g dx]`` live in a space
spanned by the standard monomials of the ideal.  :func:`reduce_nform` finds
the coordinates and keeps the primitive, so every answer carries a
certificate ``g dx - sum c_b b dx = d_f h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    InputError,
    IterationCapExceeded,
    NotZeroDimensional,
    SpecMismatch,
)
from .forms import Form, TwistedComplex, twisted_d
from .groebner import GroebnerBasis, groebner
from .linalg import identity, inverse, is_symmetric, mat_mul, rank, solve
from .poly import Poly, monomial_divides, monomial_str, monomials_up_to
from .rings import Integers, Rationals, Ring, RingHom


def basis_order_key(e):
    """Increasing degree; inside a degree ``x1`` before ``x2`` and so on."""
    return (sum(e), tuple(reversed(e)))


@dataclass
class MilnorData:
    f: Poly
    gradient: list
    groebner: GroebnerBasis
    basis: list
    mu: int
    bounded_cofactors: bool
    _nf_cache: dict = field(default_factory=dict, repr=False)

    @property
    def ring(self) -> Ring:
        return self.f.ring

    @property
    def nvars(self) -> int:
        return self.f.nvars

    def basis_strings(self, names=None) -> list[str]:
        return [monomial_str(e, names) for e in self.basis]


def _bounded_cofactors(gb: GroebnerBasis, grad: list[Poly]):
    """Representations ``g_i = sum q_a d_a f`` with ``deg q_a + deg d_a f <= deg g_i``.

    Returns None if some basis element has no such representation.
    """
    ring, n = gb.ring, gb.nvars
    out = []
    for g in gb.polys:
        d = int(g.degree())
        cols = []  # (a, monomial)
        for a, p in enumerate(grad):
            if p.is_zero() or p.degree() > d:
                continue
            for m in monomials_up_to(n, d - int(p.degree())):
                cols.append((a, m))
        rows = monomials_up_to(n, d)
        index = {m: i for i, m in enumerate(rows)}
        M = [[ring.zero] * len(cols) for _ in rows]
        for j, (a, m) in enumerate(cols):
            for e, c in grad[a].items():
                e2 = tuple(x + y for x, y in zip(e, m))
                M[index[e2]][j] = ring.add(M[index[e2]][j], c)
        rhs = [g.coeff(m) for m in rows]
        if not cols:
            return None
        sol = solve(ring, M, rhs)
        if sol is None:
            return None
        q = [dict() for _ in grad]
        for (a, m), v in zip(cols, sol):
            if not ring.is_zero(v):
                q[a][m] = v
        out.append([Poly(ring, n, t, canonical=True) for t in q])
    return out


def milnor_basis(f: Poly) -> MilnorData:
    """Groebner basis of the Jacobian ideal and the standard monomials."""
    ring, n = f.ring, f.nvars
    if not ring.is_field:
        raise SpecMismatch(f"Milnor computations need field coefficients, got {ring}")
    if n == 0:
        raise InputError("need at least one variable")
    grad = f.gradient()
    if all(p.is_zero() for p in grad):
        raise NotZeroDimensional("f is constant; every point is critical")
    gb = groebner(grad)
    if gb.is_unit_ideal():
        basis = []
    else:
        caps = [None] * n
        for lm in gb.leading:
            support = [i for i, k in enumerate(lm) if k]
            if len(support) == 1:
                i = support[0]
                caps[i] = lm[i] if caps[i] is None else min(caps[i], lm[i])
        missing = [i + 1 for i, c in enumerate(caps) if c is None]
        if missing:
            raise NotZeroDimensional(
                "Jacobian ideal is not zero-dimensional (no pure power of "
                + ", ".join(f"x{i}" for i in missing)
                + " among leading terms); critical points are not isolated"
            )
        basis = []

        def rec(prefix):
            k = len(prefix)
            if k == n:
                e = tuple(prefix)
                if not any(monomial_divides(lm, e) for lm in gb.leading):
                    basis.append(e)
                return
            for j in range(caps[k]):
                rec(prefix + [j])

        rec([])
        basis.sort(key=basis_order_key)
    bounded = _bounded_cofactors(gb, grad)
    if bounded is not None:
        gb = GroebnerBasis(ring, n, gb.generators, gb.polys, bounded)
    return MilnorData(f, grad, gb, basis, len(basis), bounded is not None)


@dataclass
class Reduction:
    """Coordinates of ``[g dx]`` plus the pieces ``H_a`` of the primitive."""

    coords: list
    H: list
    passes: int


def _monomial_nf(M: MilnorData, e):
    hit = M._nf_cache.get(e)
    if hit is None:
        mono = Poly.monomial(M.ring, M.nvars, e)
        quo, rem = M.groebner.divide(mono)
        q = M.groebner.generator_cofactors(quo)
        hit = (rem, q)
        M._nf_cache[e] = hit
    return hit


def reduce_nform(M: MilnorData, g: Poly, *, cap: int | None = None) -> Reduction:
    """Coordinates of ``[g dx]`` in the standard-monomial basis.

    Each pass divides by the Jacobian ideal, ``cur = r + sum q_a d_a f``, keeps
    ``r``, and continues with ``-sum d_a q_a`` (because ``q d_a f = -d_a q``
    modulo ``d_f``-exact forms).
    """
    ring, n = M.ring, M.nvars
    if g.ring != ring or g.nvars != n:
        if g.nvars != n:
            raise SpecMismatch(f"g has {g.nvars} variables, f has {n}")
        g = g.base_change(RingHom(g.ring, ring))
    deg = 0 if g.is_zero() else int(g.degree())
    cap = cap if cap is not None else 64 * (1 + deg)
    r_total = Poly.zero(ring, n)
    H = [Poly.zero(ring, n) for _ in range(n)]
    cur = g
    passes = 0
    while not cur.is_zero():
        passes += 1
        if passes > cap:
            raise IterationCapExceeded(f"reduction did not finish within {cap} passes")
        r = Poly.zero(ring, n)
        q = [Poly.zero(ring, n) for _ in range(n)]
        for e, c in cur.items():
            rem, qs = _monomial_nf(M, e)
            r = r + rem.scale(c)
            for a in range(n):
                if not qs[a].is_zero():
                    q[a] = q[a] + qs[a].scale(c)
        r_total = r_total + r
        nxt = Poly.zero(ring, n)
        for a in range(n):
            H[a] = H[a] + q[a]
            nxt = nxt - q[a].diff(a)
        cur = nxt
    coords = [r_total.coeff(b) for b in M.basis]
    leftover = r_total - Poly(ring, n, {b: r_total.coeff(b) for b in M.basis})
    if not leftover.is_zero():
        raise ArithmeticError("normal form left the standard-monomial span")
    return Reduction(coords, H, passes)


def witness_form(H: Sequence[Poly]) -> Form:
    """``sum_a (-1)^a H_a dx_{all but a}``, whose ``d_f`` is ``sum_a (d_a H_a + d_a f H_a) dx``."""
    n = len(H)
    out = Form(H[0].ring, n)
    for a, h in enumerate(H):
        rest = tuple(i for i in range(n) if i != a)
        out = out + Form.from_poly(h if a % 2 == 0 else -h, rest)
    return out


def exactness_witness(M: MilnorData, g: Poly, c: Sequence | None = None) -> Form:
    """An (n-1)-form ``h`` with ``g dx - sum c_b b dx = d_f h``, checked by expansion."""
    red = reduce_nform(M, g)
    if c is not None and list(c) != red.coords:
        raise InputError("given coordinates are not the reduction of g")
    h = witness_form(red.H)
    ring, n = M.ring, M.nvars
    g = reduce_input(M, g)
    target = g - Poly(ring, n, dict(zip(M.basis, red.coords)))
    lhs = twisted_d(TwistedComplex(f=M.f), h)
    if lhs != Form.top(target):
        raise ArithmeticError("exactness witness failed to verify")
    return h


def reduce_input(M: MilnorData, g: Poly) -> Poly:
    if g.ring != M.ring:
        return g.base_change(RingHom(g.ring, M.ring))
    return g


def milnor_number(f: Poly) -> int:
    return milnor_basis(f).mu


def milnor_number_by_rank(f: Poly, weights: Sequence[int]) -> int:
    """Milnor number of a weighted-homogeneous ``f`` by graded linear algebra.

    Independent of the Groebner code: for each weighted degree ``k`` the
    quotient dimension is ``dim K[x]_k - rank(sum_a K[x]_{k - deg d_a f} -> K[x]_k)``.
    """
    ring, n = f.ring, f.nvars
    w = list(weights)
    degs = {sum(a * b for a, b in zip(e, w)) for e in f.terms}
    if len(degs) != 1:
        raise InputError("f is not weighted homogeneous for the given weights")
    d = degs.pop()
    grad = f.gradient()
    socle = sum(d - 2 * wi for wi in w)
    top = max(socle, 0) + 2 * max(w) + 1

    def graded(k):
        if k < 0:
            return []
        out = []
        for e in monomials_up_to(n, k):
            if sum(a * b for a, b in zip(e, w)) == k:
                out.append(e)
        return out

    total = 0
    tail = []
    for k in range(top + 1):
        target = graded(k)
        if not target:
            tail.append(0)
            continue
        index = {m: i for i, m in enumerate(target)}
        cols = []
        for a, p in enumerate(grad):
            for m in graded(k - (d - w[a])):
                col = [ring.zero] * len(target)
                for e, c in p.items():
                    e2 = tuple(x + y for x, y in zip(e, m))
                    col[index[e2]] = ring.add(col[index[e2]], c)
                cols.append(col)
        r = rank(ring, [list(row) for row in zip(*cols)]) if cols else 0
        dim = len(target) - r
        total += dim
        tail.append(dim)
    if any(tail[socle + 1:]):
        raise NotZeroDimensional("graded quotient does not vanish past the socle degree")
    return total


# ---------------------------------------------------------------------------
# quadratic case over an arbitrary ring
# ---------------------------------------------------------------------------

@dataclass
class QuadraticReport:
    n: int
    ring: str
    degree: int
    scalar_reduction: bool
    witnesses_verified: int
    normalization: bool
    boundaries_vanish: bool
    lower_degrees_exact: bool | None
    passed: bool
    samples: dict = field(default_factory=dict)


class QuadraticReducer:
    """Reduction of ``g dx`` modulo ``d_f`` for ``f = x^T A x / 2`` over any ring.

    Only ``df = A x`` is used, so ``A`` may have entries in rings without 1/2.
    """

    def __init__(self, ring: Ring, A):
        n = len(A)
        self.ring, self.n = ring, n
        self.A = [[ring.convert(a) for a in row] for row in A]
        if not is_symmetric(ring, self.A):
            raise InputError("A must be symmetric")
        self.Ainv = inverse(ring, self.A)
        if mat_mul(ring, self.A, self.Ainv) != identity(ring, n):
            raise ArithmeticError("matrix inverse failed verification")
        terms = []
        for a in range(n):
            p = {}
            for b in range(n):
                if not ring.is_zero(self.A[a][b]):
                    e = [0] * n
                    e[b] = 1
                    p[tuple(e)] = self.A[a][b]
            terms.append(Poly(ring, n, p))
        self.df = Form(ring, n, {(a,): terms[a] for a in range(n)})
        self.complex = TwistedComplex(df=self.df)
        self._memo: dict = {}

    def monomial(self, e):
        """(scalar, [H_a]) with ``x^e dx - scalar dx = d_f(witness_form(H))``."""
        hit = self._memo.get(e)
        if hit is not None:
            return hit
        ring, n = self.ring, self.n
        if not any(e):
            out = (ring.one, [Poly.zero(ring, n) for _ in range(n)])
            self._memo[e] = out
            return out
        k = next(i for i, x in enumerate(e) if x)
        rest = list(e)
        rest[k] -= 1
        rest = tuple(rest)
        g1 = Poly.monomial(ring, n, rest)
        # x_k g' dx = d_f(h) - sum_a Ainv[k][a] d_a g' dx  with  H_a = Ainv[k][a] g'
        scalar = ring.zero
        H = []
        for a in range(n):
            H.append(g1.scale(self.Ainv[k][a]))
        for a in range(n):
            w = self.Ainv[k][a]
            if ring.is_zero(w) or rest[a] == 0:
                continue
            d = list(rest)
            d[a] -= 1
            s, Hd = self.monomial(tuple(d))
            coef = ring.neg(ring.mul(w, ring.from_int(rest[a])))
            scalar = ring.add(scalar, ring.mul(coef, s))
            H = [h + hd.scale(coef) for h, hd in zip(H, Hd)]
        out = (scalar, H)
        self._memo[e] = out
        return out

    def reduce(self, g: Poly):
        ring, n = self.ring, self.n
        scalar = ring.zero
        H = [Poly.zero(ring, n) for _ in range(n)]
        for e, c in g.items():
            s, He = self.monomial(e)
            scalar = ring.add(scalar, ring.mul(c, s))
            H = [h + x.scale(c) for h, x in zip(H, He)]
        return scalar, H

    def verify(self, g: Poly, scalar, H) -> bool:
        ring, n = self.ring, self.n
        lhs = twisted_d(self.complex, witness_form(H)) if n > 0 else Form(ring, n)
        return lhs == Form.top(g - Poly(ring, n, {(0,) * n: scalar}))


def _twisted_matrix(C: TwistedComplex, k: int, D: int):
    """Matrix of ``d_f`` from k-forms of degree <= D to (k+1)-forms of degree <= D+1, over QQ."""
    n, ring = C.nvars, C.ring
    src = [(S, m) for S in combinations(range(n), k) for m in monomials_up_to(n, D)]
    tgt = [(S, m) for S in combinations(range(n), k + 1) for m in monomials_up_to(n, D + 1)]
    index = {t: i for i, t in enumerate(tgt)}
    Q = Rationals()
    to_q = RingHom(ring, Q)
    M = [[Fraction(0)] * len(src) for _ in tgt]
    for j, (S, m) in enumerate(src):
        w = twisted_d(C, Form.from_poly(Poly.monomial(ring, n, m), S))
        for T, p in w.components.items():
            for e, c in p.items():
                M[index[(T, e)]][j] += to_q.apply(c)
    return M, len(src)


def quadratic_rank_check(ring: Ring, A, degree: int = 4) -> QuadraticReport:
    """Check on truncated complexes that top cohomology is free of rank one.

    * every ``x^e dx`` with ``|e| <= degree`` reduces to a scalar, with witness;
    * ``dx`` reduces to 1;
    * reductions of ``d_f`` of (n-1)-forms vanish;
    * over torsion-free rings of characteristic zero without a parameter, lower
      degrees are exact: closed k-forms of degree <= D are ``d_f`` of forms of
      degree <= D - 1 (rank comparison over QQ).
    """
    R = QuadraticReducer(ring, A)
    n = R.n
    verified = 0
    scalar_ok = True
    samples = {}
    for e in monomials_up_to(n, degree):
        g = Poly.monomial(ring, n, e)
        s, H = R.reduce(g)
        if not R.verify(g, s, H):
            scalar_ok = False
        else:
            verified += 1
        samples[monomial_str(e)] = ring.fmt(s)
    one_s, _ = R.reduce(Poly.const(ring, n, 1))
    normalization = ring.is_one(one_s)
    boundaries = True
    for m in monomials_up_to(n, max(degree - 1, 0)):
        for a in range(n):
            rest = tuple(i for i in range(n) if i != a)
            w = twisted_d(R.complex, Form.from_poly(Poly.monomial(ring, n, m), rest))
            s, _ = R.reduce(w.top_coefficient())
            if not ring.is_zero(s):
                boundaries = False
    exact = None
    if isinstance(ring, (Integers, Rationals)):
        exact = True
        Q = Rationals()
        for k in range(n):
            # closed k-forms of degree <= degree
            Mk, ncols = _twisted_matrix(R.complex, k, degree)
            kernel_dim = ncols - rank(Q, Mk)
            if k == 0:
                image_dim = 0
            else:
                Mprev, _ = _twisted_matrix(R.complex, k - 1, degree - 1)
                image_dim = rank(Q, Mprev)
            if kernel_dim != image_dim:
                exact = False
    passed = scalar_ok and normalization and boundaries and exact is not False
    return QuadraticReport(
        n=n,
        ring=str(ring),
        degree=degree,
        scalar_reduction=scalar_ok,
        witnesses_verified=verified,
        normalization=normalization,
        boundaries_vanish=boundaries,
        lower_degrees_exact=exact,
        passed=passed,
        samples=samples,
    )

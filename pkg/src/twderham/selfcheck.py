"""Randomized end-to-end checks, one block per acceptance criterion.

Every block takes a ``random.Random`` and a scale (``"full"`` or ``"reduced"``)
and returns a :class:`CheckResult`.  The same generators are used by the test
suite and by ``twderham selftest``.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .constraints import ConstraintProblem, certify_delta_chain_map, codim_m_map
from .dwork import FrobContext, dwork_theta, frobenius_eigenvalue, overconvergence_slope
from .families import FamilyProblem, picard_fuchs
from .forms import Form
from .linalg import det
from .milnor import exactness_witness, milnor_basis, quadratic_rank_check, reduce_nform
from .perturb import GaussianProblem, base_change_problem, check_vanishing, integrality_report, integrate, wick_oracle
from .poly import Poly, monomials_up_to
from .rings import Integers, Modular, PiAdic, Rationals, RingElement, RingHom, TruncatedSeries

ZZ, QQ = Integers(), Rationals()


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

def random_poly(rng: random.Random, ring, n: int, degree: int, *, terms: int = 4, coeff: int = 3,
                min_degree: int = 0, rational: bool = False) -> Poly:
    monos = [e for e in monomials_up_to(n, degree) if sum(e) >= min_degree]
    out = {}
    for _ in range(rng.randint(1, terms)):
        e = rng.choice(monos)
        c = rng.randint(-coeff, coeff)
        if rational:
            c = Fraction(c, rng.randint(1, 3))
        out[e] = ring.convert(c)
    return Poly(ring, n, out)


def random_symmetric_rational(rng: random.Random, n: int) -> list:
    while True:
        A = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                A[i][j] = A[j][i] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if det(QQ, A) != 0:
            return A


def random_unimodular_symmetric(rng: random.Random, n: int, ops: int = 3) -> list:
    """``U^T diag(+-1) U`` with ``U`` a product of elementary integer matrices."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    if n > 1:
        for _ in range(ops):
            i, j = rng.sample(range(n), 2)
            k = rng.choice([-2, -1, 1, 2])
            U[i] = [a + k * b for a, b in zip(U[i], U[j])]
    D = [rng.choice([-1, 1]) for _ in range(n)]
    return [[sum(U[k][i] * D[k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def random_isolated(rng: random.Random, ring, n: int, *, max_exp: int = 4, rational: bool = True) -> Poly:
    """``sum c_i x_i^{d_i}`` plus terms of weighted degree below one: isolated critical points."""
    ds = [rng.randint(2, max_exp) for _ in range(n)]
    terms = {}
    for i, d in enumerate(ds):
        e = [0] * n
        e[i] = d
        terms[tuple(e)] = ring.convert(rng.choice([1, 2, -1, 3]))
    low = [e for e in monomials_up_to(n, max(ds)) if 0 < sum(Fraction(a, d) for a, d in zip(e, ds)) < 1]
    for _ in range(rng.randint(0, 3)):
        if low:
            c = Fraction(rng.randint(-3, 3), rng.randint(1, 2) if rational else 1)
            terms[rng.choice(low)] = ring.convert(c)
    return Poly(ring, n, terms)


def _random_form(rng: random.Random, ring, n: int, degree: int, poly_degree: int = 2) -> Form:
    out = Form(ring, n)
    subsets = list(itertools.combinations(range(n), degree))
    for s in rng.sample(subsets, min(len(subsets), rng.randint(1, 2))):
        out = out + Form.from_poly(random_poly(rng, ring, n, poly_degree, terms=3), s)
    return out


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f"/{self.budget:.0f}s" if self.budget else ""
        return f"{status} {self.name}: {self.detail} ({self.seconds:.1f}s{budget})"


def check_wick(rng, scale):
    nmat = 25 if scale == "full" else 4
    maxdeg = 8 if scale == "full" else 6
    count = 0
    for k in range(nmat):
        n = 1 + k % 3
        A = random_symmetric_rational(rng, n)
        P = GaussianProblem(QQ, A)
        for e in monomials_up_to(n, maxdeg):
            got = integrate(P, Poly.monomial(QQ, n, e)).coeffs[0]
            want = wick_oracle(QQ, A, e)
            if got != want:
                return False, f"A={A} monomial {e}: integrate {got} != wick {want}"
            count += 1
    return True, f"{count} monomial integrals agree with the matching sum"


def check_integrality(rng, scale):
    runs = 20 if scale == "full" else 5
    for _ in range(runs):
        n = rng.randint(1, 2)
        A = random_unimodular_symmetric(rng, n)
        V = random_poly(rng, ZZ, n, 4, min_degree=1, terms=3, coeff=2)
        g = random_poly(rng, ZZ, n, 4, terms=3)
        rep = integrality_report(GaussianProblem(ZZ, A, V, 8), g)
        if not (rep.integral and rep.matches_rational):
            return False, f"A={A} V={V} g={g}: integral={rep.integral} matches={rep.matches_rational}"
    return True, f"{runs} order-8 series are integral and agree over ZZ and QQ"


def check_vanishing_block(rng, scale):
    runs = 500 if scale == "full" else 100
    for _ in range(runs):
        n = rng.randint(1, 3)
        A = random_symmetric_rational(rng, n)
        V = random_poly(rng, QQ, n, 3, min_degree=1, terms=3, rational=True)
        P = GaussianProblem(QQ, A, V, rng.randint(1, 4))
        h = random_poly(rng, QQ, n, 3, terms=3, rational=True)
        a = rng.randrange(n)
        s = check_vanishing(P, h, a)
        if not s.is_zero():
            return False, f"nonzero vanishing series {s} for h={h}, a={a}"
    return True, f"{runs} instances vanish"


def check_quadratic(rng, scale):
    runs = 10 if scale == "full" else 3
    degree = 4 if scale == "full" else 3
    S = TruncatedSeries(ZZ, "lambda", 4)
    for k in range(runs):
        n = 1 + k % 3
        A = random_unimodular_symmetric(rng, n)
        rep = quadratic_rank_check(ZZ, A, degree)
        if not rep.passed:
            return False, f"over ZZ, A={A}: {rep}"
        B = random_symmetric_rational(rng, n)
        B = [[int(x.numerator) for x in row] for row in B]
        As = [
            [RingElement(S, S.from_param_poly({0: Fraction(A[i][j]), 1: Fraction(B[i][j])})) for j in range(n)]
            for i in range(n)
        ]
        rep = quadratic_rank_check(S, As, degree)
        if not rep.passed:
            return False, f"over {S}, A={A}+lambda*{B}: {rep}"
    return True, f"{runs} matrices over ZZ and ZZ[lambda]/(lambda^4), degree <= {degree}"


def check_milnor(rng, scale):
    x = Poly.var(QQ, 1, 0)
    for d in range(1, 10):
        mu = milnor_basis(x ** (d + 1)).mu
        if mu != d:
            return False, f"mu(x^{d + 1}) = {mu}"
    X, Y = Poly.var(QQ, 2, 0), Poly.var(QQ, 2, 1)
    for f, want in ((X**3 + Y**3, 4), (X**3 + Y**4, 6)):
        if milnor_basis(f).mu != want:
            return False, f"mu({f}) = {milnor_basis(f).mu}, expected {want}"
    runs = 10 if scale == "full" else 4
    for _ in range(runs):
        n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
        f = random_isolated(rng, QQ, n1)
        g = random_isolated(rng, QQ, n2)
        total = f.embed(n1 + n2, list(range(n1))) + g.embed(n1 + n2, list(range(n1, n1 + n2)))
        if milnor_basis(total).mu != milnor_basis(f).mu * milnor_basis(g).mu:
            return False, f"product law fails for {f} and {g}"
    return True, f"power series, x^3+y^3, x^3+y^4 and {runs} disjoint sums"


def check_witness(rng, scale):
    runs = 200 if scale == "full" else 40
    for _ in range(runs):
        n = rng.randint(1, 2) if rng.random() < 0.9 else 3
        f = random_isolated(rng, QQ, n, max_exp=4 if n < 3 else 3)
        M = milnor_basis(f)
        g = random_poly(rng, QQ, n, 4, terms=4, rational=True)
        try:
            exactness_witness(M, g, reduce_nform(M, g).coords)
        except ArithmeticError as exc:
            return False, f"f={f} g={g}: {exc}"
    return True, f"{runs} witnesses verified by expansion"


def _proportional(got, want) -> bool:
    """Coefficient lists (ascending in lambda) agree up to a nonzero rational factor."""
    if len(got) != len(want):
        return False
    flat_got, flat_want = [], []
    for a, b in zip(got, want):
        width = max(len(a), len(b))
        flat_got += [Fraction(x) for x in a] + [Fraction(0)] * (width - len(a))
        flat_want += [Fraction(x) for x in b] + [Fraction(0)] * (width - len(b))
    pivot = next((i for i, b in enumerate(flat_want) if b), None)
    if pivot is None or not flat_got[pivot]:
        return False
    ratio = flat_got[pivot] / flat_want[pivot]
    return all(a == ratio * b for a, b in zip(flat_got, flat_want))


def check_picard_fuchs(rng, scale):
    airy = picard_fuchs(FamilyProblem.parse("x1^3/3 - lambda*x1", seed=rng.randrange(10**6)), [1])
    if not _proportional(airy.coefficients, [(0, -1), (), (1,)]):
        return False, f"Airy operator {airy.strings()}"
    gauss = picard_fuchs(FamilyProblem.parse("-lambda*x1^2/2", seed=rng.randrange(10**6)), [1])
    if not _proportional(gauss.coefficients, [(1,), (0, 2)]):
        return False, f"Gaussian operator {gauss.strings()}"
    return True, f"D^2 - lambda and 2*lambda*D + 1 recovered ({airy.strings()}, {gauss.strings()})"


def check_constraints(rng, scale):
    runs = 200 if scale == "full" else 40
    for _ in range(runs):
        n = rng.randint(1, 3)
        c = random_poly(rng, QQ, n, 2, min_degree=1, terms=3)
        f = random_poly(rng, QQ, n, 2, terms=2) if rng.random() < 0.5 else None
        P = ConstraintProblem(f, [c])
        k = rng.randint(0, n)
        omega = _random_form(rng, QQ, n, k)
        image = codim_m_map(P, omega)
        if not image.degrees() <= {k + 2}:
            return False, f"degree shift fails for {omega}"
        cert = certify_delta_chain_map(P, omega)
        if not (cert.verified and cert.correction_in_ideal):
            return False, f"chain-map certificate fails for P={c}, omega={omega}"
    # codimension two degree shift
    for _ in range(runs // 10):
        n = rng.randint(2, 3)
        cs = [random_poly(rng, QQ, n, 2, min_degree=1, terms=2) for _ in range(2)]
        k = rng.randint(0, n)
        omega = _random_form(rng, QQ, n, k)
        if not codim_m_map(ConstraintProblem(None, cs), omega).degrees() <= {k + 4}:
            return False, f"codim-2 degree shift fails for {omega}"
    return True, f"{runs} certificates; degree shifts +2 and +4"


def check_frobenius(rng, scale):
    for p in (3, 5, 7, 11):
        R = PiAdic(p, 20)
        if R.pow(R.pi(), p - 1) != R.from_int(-p):
            return False, f"pi^{p - 1} != -{p}"
    theta = dwork_theta(FrobContext(3, 20, 40))
    c = overconvergence_slope(theta.exact_valuations())
    if not c > 0:
        return False, f"theta slope {c}"
    primes = (3, 5, 7) if scale == "full" else (3, 5)
    f = Poly.monomial(QQ, 1, (2,), Fraction(1, 2))
    for p in primes:
        res = frobenius_eigenvalue(FrobContext(p, 20, 60), f)
        want = str((-1) ** ((p - 1) // 2) * p)
        if res.valuation != Fraction(1, 2) or not res.precision_ok or res.alpha_squared_mod() != want:
            return False, f"p={p}: v={res.valuation}, alpha^2 = {res.alpha_squared_mod()}, ok={res.precision_ok}"
    return True, f"pi relation, theta slope {c}, v(alpha)=1/2 and alpha^2 = +-p at p in {primes}"


def check_functoriality(rng, scale):
    runs = 100 if scale == "full" else 25
    F7 = Modular(7)
    to7, toq = RingHom(ZZ, F7), RingHom(ZZ, QQ)
    for _ in range(runs):
        n = rng.randint(1, 2)
        A = random_unimodular_symmetric(rng, n)
        V = random_poly(rng, ZZ, n, 3, min_degree=1, terms=2, coeff=2)
        g = random_poly(rng, ZZ, n, 4, terms=3)
        P = GaussianProblem(ZZ, A, V, rng.randint(1, 4))
        base = integrate(P, g)
        for h in (to7, toq):
            there = integrate(base_change_problem(P, h), g.base_change(h))
            if base.base_change(h) != there:
                return False, f"{h.codomain}: {base} vs {there}"
    return True, f"{runs} integrals commute with ZZ->ZZ/7 and ZZ->QQ"


@dataclass(frozen=True)
class Criterion:
    key: str
    title: str
    run: Callable
    budget: float | None


CRITERIA = [
    Criterion("wick", "1 Wick equivalence", check_wick, 60),
    Criterion("integrality", "2 Integrality", check_integrality, 120),
    Criterion("vanishing", "3 Vanishing relation", check_vanishing_block, 60),
    Criterion("quadratic", "4 Quadratic rank one", check_quadratic, None),
    Criterion("milnor", "5 Milnor numbers", check_milnor, None),
    Criterion("witness", "6 Certified reduction", check_witness, None),
    Criterion("picard-fuchs", "7 Picard-Fuchs", check_picard_fuchs, 30),
    Criterion("constraints", "8 Constraint maps", check_constraints, None),
    Criterion("frobenius", "9 Frobenius", check_frobenius, 120),
    Criterion("functoriality", "10 Functoriality", check_functoriality, None),
]


def run_checks(*, only=None, seed: int = 0, scale: str = "reduced", emit=None) -> list[CheckResult]:
    """Run the selected blocks; each block gets its own generator derived from ``seed``."""
    keys = [c.key for c in CRITERIA]
    if only:
        unknown = [k for k in only if k not in keys]
        if unknown:
            raise KeyError(f"unknown check {unknown[0]!r}; choose from {', '.join(keys)}")
    results = []
    for idx, crit in enumerate(CRITERIA):
        if only and crit.key not in only:
            continue
        rng = random.Random(seed * 1009 + idx)
        t0 = time.perf_counter()
        try:
            ok, detail = crit.run(rng, scale)
        except Exception as exc:  # a crash is a failure of the block, reported as such
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        dt = time.perf_counter() - t0
        budget = crit.budget if scale == "full" else None
        if budget is not None and dt > budget:
            ok, detail = False, f"{detail}; over budget"
        res = CheckResult(crit.title, ok, detail, dt, budget)
        if emit is not None:
            emit(res.line())
        results.append(res)
    return results

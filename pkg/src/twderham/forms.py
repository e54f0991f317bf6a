"""Polynomial differential forms and the twisted differential ``d + df^``.

A :class:`Form` stores one polynomial coefficient per strictly increasing
index tuple ``S`` (0-based internally), standing for
``dx_{s1} ^ ... ^ dx_{sk}``.  Products of differentials are brought to this
canonical order with the sign of the sorting permutation.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import NotClosed, SpecMismatch
from .poly import Poly
from .rings import Ring, RingHom


def _merge_sign(s: tuple[int, ...], t: tuple[int, ...]):
    """Sorted union of disjoint index tuples and the wedge sign, or None on overlap."""
    inversions = 0
    for a in s:
        for b in t:
            if a == b:
                return None
            if a > b:
                inversions += 1
    return tuple(sorted(s + t)), (-1 if inversions & 1 else 1)


def sort_indices(idx: Sequence[int]):
    """Canonical (sorted tuple, sign) for ``dx_{idx[0]} ^ dx_{idx[1]} ^ ...``; None if repeated."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


class Form:
    __slots__ = ("ring", "nvars", "components")

    def __init__(self, ring: Ring, nvars: int, components=None):
        self.ring = ring
        self.nvars = nvars
        comps = {}
        for s, p in (components or {}).items():
            s = tuple(s)
            if list(s) != sorted(set(s)) or any(not 0 <= i < nvars for i in s):
                raise ValueError(f"index set {s} is not strictly increasing in range({nvars})")
            if p.ring != ring or p.nvars != nvars:
                raise SpecMismatch("form coefficient lives in a different polynomial ring")
            if not p.is_zero():
                comps[s] = p
        self.components = comps

    # --- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars):
        return cls(ring, nvars)

    @classmethod
    def from_poly(cls, p: Poly, indices: Sequence[int] = ()):
        """``p * dx_{indices}`` (indices in any order; sign applied)."""
        key = sort_indices(indices)
        if key is None:
            return cls(p.ring, p.nvars)
        s, sign = key
        return cls(p.ring, p.nvars, {s: p if sign > 0 else -p})

    @classmethod
    def dx(cls, ring, nvars, i):
        return cls.from_poly(Poly.const(ring, nvars, 1), (i,))

    @classmethod
    def top(cls, p: Poly):
        """``p * dx_1 ^ ... ^ dx_n``."""
        return cls.from_poly(p, tuple(range(p.nvars)))

    # --- protocol ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.nvars == other.nvars
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.ring, self.nvars, frozenset(self.components.items())))

    def is_zero(self) -> bool:
        return not self.components

    def degrees(self) -> set[int]:
        return {len(s) for s in self.components}

    def degree(self) -> int:
        """Form degree of a homogeneous form (0 for the zero form)."""
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError(f"form is not homogeneous (degrees {sorted(degs)})")
        return degs.pop() if degs else 0

    def part(self, k: int) -> Form:
        return Form(self.ring, self.nvars, {s: p for s, p in self.components.items() if len(s) == k})

    def coefficient(self, indices: Sequence[int]) -> Poly:
        key = sort_indices(indices)
        if key is None:
            return Poly.zero(self.ring, self.nvars)
        s, sign = key
        p = self.components.get(s, Poly.zero(self.ring, self.nvars))
        return p if sign > 0 else -p

    def top_coefficient(self) -> Poly:
        return self.coefficient(tuple(range(self.nvars)))

    def _check(self, other: Form):
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if self.ring != other.ring or self.nvars != other.nvars:
            raise SpecMismatch("forms over different rings or variable counts")

    def __add__(self, other):
        self._check(other)
        out = dict(self.components)
        for s, p in other.components.items():
            out[s] = out[s] + p if s in out else p
        return Form(self.ring, self.nvars, out)

    def __neg__(self):
        return Form(self.ring, self.nvars, {s: -p for s, p in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, g) -> Form:
        """Multiply every component by a polynomial or a ring payload."""
        if isinstance(g, Poly):
            if g.ring != self.ring or g.nvars != self.nvars:
                raise SpecMismatch("scaling form by polynomial from another ring")
            return Form(self.ring, self.nvars, {s: p * g for s, p in self.components.items()})
        return Form(self.ring, self.nvars, {s: p.scale(g) for s, p in self.components.items()})

    def map_polys(self, fn, ring=None, nvars=None) -> Form:
        return Form(
            ring or self.ring,
            self.nvars if nvars is None else nvars,
            {s: fn(p) for s, p in self.components.items()},
        )

    def embed(self, nvars: int, positions: Sequence[int]) -> Form:
        """Move variable ``i`` (and ``dx_i``) to ``positions[i]`` among ``nvars`` variables."""
        out = Form(self.ring, nvars)
        for s, p in self.components.items():
            out = out + Form.from_poly(p.embed(nvars, positions), [positions[i] for i in s])
        return out

    def format(self, names: Sequence[str] | None = None) -> str:
        names = list(names or [f"x{i + 1}" for i in range(self.nvars)])
        if not self.components:
            return "0"
        pieces = []
        for s in sorted(self.components, key=lambda s: (len(s), s)):
            p = self.components[s]
            diff = "^".join(f"d{names[i]}" for i in s)
            ps = p.format(names)
            if not diff:
                pieces.append(ps if len(p) == 1 else f"({ps})")
            elif p.is_constant() and p.ring.is_one(p.constant_term()):
                pieces.append(diff)
            else:
                pieces.append(f"({ps}) * {diff}")
        return " + ".join(pieces)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Form({self.ring}, {self.nvars}, {self.format()!r})"


# ---------------------------------------------------------------------------
# exterior calculus
# ---------------------------------------------------------------------------

def wedge(alpha: Form, beta: Form) -> Form:
    alpha._check(beta)
    out: dict = {}
    for s, p in alpha.components.items():
        for t, q in beta.components.items():
            merged = _merge_sign(s, t)
            if merged is None:
                continue
            u, sign = merged
            term = p * q
            if sign < 0:
                term = -term
            out[u] = out[u] + term if u in out else term
    return Form(alpha.ring, alpha.nvars, out)


def wedge_all(forms: Iterable[Form]) -> Form:
    forms = list(forms)
    acc = forms[0]
    for f in forms[1:]:
        acc = wedge(acc, f)
    return acc


def de_rham_d(omega: Form) -> Form:
    out: dict = {}
    for s, p in omega.components.items():
        for i in range(omega.nvars):
            if i in s:
                continue
            dp = p.diff(i)
            if dp.is_zero():
                continue
            merged = _merge_sign((i,), s)
            u, sign = merged
            term = dp if sign > 0 else -dp
            out[u] = out[u] + term if u in out else term
    return Form(omega.ring, omega.nvars, out)


def exact_one_form(f: Poly) -> Form:
    """``df`` as a 1-form."""
    return Form(f.ring, f.nvars, {(i,): f.diff(i) for i in range(f.nvars)})


def interior(eta: Sequence[Poly], omega: Form) -> Form:
    """Contraction with the vector field ``sum eta[i] d/dx_i``."""
    if len(eta) != omega.nvars:
        raise ValueError(f"vector field needs {omega.nvars} components")
    out: dict = {}
    for s, p in omega.components.items():
        for j, i in enumerate(s):
            if eta[i].is_zero():
                continue
            u = s[:j] + s[j + 1:]
            term = p * eta[i]
            if j & 1:
                term = -term
            out[u] = out[u] + term if u in out else term
    return Form(omega.ring, omega.nvars, out)


def lie_derivative(eta: Sequence[Poly], omega: Form) -> Form:
    """``L_eta`` computed from ``L_eta(dx_i) = d(eta_i)`` and the Leibniz rule."""
    n = omega.nvars
    ring = omega.ring
    d_eta = [exact_one_form(e) for e in eta]
    out = Form(ring, n)
    for s, p in omega.components.items():
        directional = Poly.zero(ring, n)
        for i in range(n):
            directional = directional + eta[i] * p.diff(i)
        out = out + Form.from_poly(directional, s)
        for j, i in enumerate(s):
            left = Form.from_poly(p, s[:j])
            right = Form.from_poly(Poly.const(ring, n, 1), s[j + 1:])
            out = out + wedge(wedge(left, d_eta[i]), right)
    return out


class TwistedComplex:
    """The complex of polynomial forms with differential ``d + df ^``.

    Only the closed 1-form ``df`` enters; it may be supplied directly when
    ``f`` itself does not have coefficients in the ring.
    """

    __slots__ = ("ring", "nvars", "f", "df")

    def __init__(self, f: Poly | None = None, df: Form | None = None):
        if (f is None) == (df is None):
            raise ValueError("give exactly one of f or df")
        if f is not None:
            self.f = f
            self.df = exact_one_form(f)
        else:
            if df.degrees() - {1}:
                raise NotClosed("df must be a 1-form")
            if not de_rham_d(df).is_zero():
                raise NotClosed("the supplied 1-form is not closed")
            self.f = None
            self.df = df
        self.ring = self.df.ring
        self.nvars = self.df.nvars

    def partial(self, i: int) -> Poly:
        return self.df.coefficient((i,))

    def d(self, omega: Form) -> Form:
        return twisted_d(self, omega)


def twisted_d(C: TwistedComplex, omega: Form) -> Form:
    return de_rham_d(omega) + wedge(C.df, omega)


def pullback(phi: Sequence[Poly], omega: Form) -> Form:
    """Pull back along ``x_i = phi[i](u)``; ``phi[i]`` are polynomials in ``m`` variables."""
    if len(phi) != omega.nvars:
        raise ValueError(f"need {omega.nvars} component polynomials, got {len(phi)}")
    target = phi[0]
    for q in phi:
        if q.ring != omega.ring or q.nvars != target.nvars:
            raise SpecMismatch("pullback components must share the form's ring")
    ring, m = omega.ring, target.nvars
    dphi = [exact_one_form(q) for q in phi]
    out = Form(ring, m)
    for s, p in omega.components.items():
        term = Form.from_poly(p.compose(phi))
        for i in s:
            term = wedge(term, dphi[i])
        out = out + term
    return out


def base_change(h: RingHom, omega: Form) -> Form:
    if h.domain != omega.ring:
        raise SpecMismatch(f"hom from {h.domain} applied to form over {omega.ring}")
    return Form(h.codomain, omega.nvars, {s: p.base_change(h) for s, p in omega.components.items()})


def base_change_complex(h: RingHom, C: TwistedComplex) -> TwistedComplex:
    if C.f is not None:
        return TwistedComplex(f=C.f.base_change(h))
    return TwistedComplex(df=base_change(h, C.df))

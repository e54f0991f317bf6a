"""Buchberger's algorithm in degrevlex, with cofactor tracking.

Each basis element remembers how it is built from the input generators, so a
division by the basis can be rewritten as a combination of the generators.
"""

from __future__ import annotations

import heapq
from typing import Sequence

from .errors import IterationCapExceeded, SpecMismatch
from .poly import Poly, degrevlex_key, monomial_divides, monomial_lcm


def _heap_key(e):
    # min-heap order == descending degrevlex
    return (-sum(e),) + tuple(reversed(e))


def _sub_scaled(ring, target: dict, c, shift, src: dict):
    """``target -= c * x^shift * src`` in place."""
    for e, v in src.items():
        e2 = tuple(a + b for a, b in zip(e, shift))
        t = ring.mul(c, v)
        old = target.get(e2)
        if old is None:
            target[e2] = ring.neg(t)
        else:
            new = ring.sub(old, t)
            if ring.is_zero(new):
                del target[e2]
            else:
                target[e2] = new


def _add_term(ring, target: dict, e, c):
    old = target.get(e)
    if old is None:
        target[e] = c
    else:
        new = ring.add(old, c)
        if ring.is_zero(new):
            del target[e]
        else:
            target[e] = new


def _lead(terms: dict):
    return max(terms, key=degrevlex_key)


class _Elem:
    __slots__ = ("terms", "lm", "lc", "cof")

    def __init__(self, terms, cof):
        self.terms = terms
        self.lm = _lead(terms)
        self.lc = terms[self.lm]
        self.cof = cof  # list of dicts, one per generator


def _reduce(ring, terms: dict, basis: list[_Elem], cof, full=True):
    """Reduce ``terms`` by ``basis``; returns (remainder, cofactors of remainder)."""
    cur = dict(terms)
    rem: dict = {}
    cof = [dict(c) for c in cof] if cof is not None else None
    heap = [_heap_key(e) for e in cur]
    heapq.heapify(heap)
    while heap:
        hk = heapq.heappop(heap)
        e = tuple(reversed(hk[1:]))
        if e not in cur:
            continue
        while heap and heap[0] == hk:
            heapq.heappop(heap)
        c = cur[e]
        for g in basis:
            if monomial_divides(g.lm, e):
                shift = tuple(a - b for a, b in zip(e, g.lm))
                q = ring.div(c, g.lc)
                before = set(cur)
                _sub_scaled(ring, cur, q, shift, g.terms)
                for e2 in set(cur) - before:
                    heapq.heappush(heap, _heap_key(e2))
                if cof is not None:
                    for k, gc in enumerate(g.cof):
                        if gc:
                            _sub_scaled(ring, cof[k], q, shift, gc)
                break
        else:
            rem[e] = c
            del cur[e]
            if not full:
                rem.update(cur)
                break
    return rem, cof


class GroebnerBasis:
    """Reduced, monic Groebner basis in degrevlex with cofactors.

    ``cofactors[i][j]`` is the coefficient of ``generators[j]`` in ``polys[i]``.
    """

    def __init__(self, ring, nvars, generators, polys, cofactors):
        self.ring = ring
        self.nvars = nvars
        self.generators = list(generators)
        self.polys = list(polys)
        self.cofactors = [list(c) for c in cofactors]
        self.leading = [p.leading_monomial() for p in self.polys]
        self._elems = [
            _Elem(dict(p.terms), [dict(c.terms) for c in cs]) for p, cs in zip(self.polys, self.cofactors)
        ]

    def is_unit_ideal(self) -> bool:
        return any(not any(e) for e in self.leading)

    def divide(self, p: Poly):
        """``p = sum(q[i] * polys[i]) + r`` with ``r`` fully reduced."""
        if p.ring != self.ring or p.nvars != self.nvars:
            raise SpecMismatch("dividend lives in a different polynomial ring")
        ring = self.ring
        cur = dict(p.terms)
        rem: dict = {}
        quo = [dict() for _ in self._elems]
        heap = [_heap_key(e) for e in cur]
        heapq.heapify(heap)
        while heap:
            hk = heapq.heappop(heap)
            e = tuple(reversed(hk[1:]))
            if e not in cur:
                continue
            c = cur[e]
            for i, g in enumerate(self._elems):
                if monomial_divides(g.lm, e):
                    shift = tuple(a - b for a, b in zip(e, g.lm))
                    q = ring.div(c, g.lc)
                    before = set(cur)
                    _sub_scaled(ring, cur, q, shift, g.terms)
                    for e2 in set(cur) - before:
                        heapq.heappush(heap, _heap_key(e2))
                    _add_term(ring, quo[i], shift, q)
                    break
            else:
                rem[e] = c
                del cur[e]
        n = self.nvars
        return [Poly(ring, n, q, canonical=True) for q in quo], Poly(ring, n, rem, canonical=True)

    def normal_form(self, p: Poly) -> Poly:
        return self.divide(p)[1]

    def contains(self, p: Poly) -> bool:
        return self.normal_form(p).is_zero()

    def generator_cofactors(self, quotients: Sequence[Poly]) -> list[Poly]:
        """Rewrite ``sum q_i polys[i]`` as ``sum c_j generators[j]``."""
        out = [Poly.zero(self.ring, self.nvars) for _ in self.generators]
        for q, cs in zip(quotients, self.cofactors):
            if q.is_zero():
                continue
            for j, c in enumerate(cs):
                if not c.is_zero():
                    out[j] = out[j] + q * c
        return out


def groebner(generators: Sequence[Poly], *, max_pairs: int = 200000) -> GroebnerBasis:
    gens = [g for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    ring, n = gens[0].ring, gens[0].nvars
    for g in gens:
        if g.ring != ring or g.nvars != n:
            raise SpecMismatch("generators live in different polynomial rings")
    if not ring.is_field:
        raise SpecMismatch(f"Groebner bases need a field, got {ring}")
    m = len(gens)
    zero_n = (0,) * n

    basis: list[_Elem] = []
    for j, g in enumerate(gens):
        if g.is_zero():
            continue
        cof = [dict() for _ in range(m)]
        cof[j] = {zero_n: ring.one}
        basis.append(_Elem(dict(g.terms), cof))

    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]

    def pair_key(p):
        return degrevlex_key(monomial_lcm(basis[p[0]].lm, basis[p[1]].lm))

    processed = 0
    while pairs:
        pairs.sort(key=pair_key)
        i, j = pairs.pop(0)
        processed += 1
        if processed > max_pairs:
            raise IterationCapExceeded(f"Buchberger exceeded {max_pairs} pairs")
        a, b = basis[i], basis[j]
        if all(x == 0 or y == 0 for x, y in zip(a.lm, b.lm)):
            continue  # coprime leading monomials
        L = monomial_lcm(a.lm, b.lm)
        if any(
            k not in (i, j)
            and monomial_divides(basis[k].lm, L)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(basis))
        ):
            continue  # chain criterion
        sa = tuple(x - y for x, y in zip(L, a.lm))
        sb = tuple(x - y for x, y in zip(L, b.lm))
        s: dict = {}
        scof = [dict() for _ in range(m)]
        ca, cb = ring.inv(a.lc), ring.inv(b.lc)
        _sub_scaled(ring, s, ring.neg(ca), sa, a.terms)
        _sub_scaled(ring, s, cb, sb, b.terms)
        for k in range(m):
            if a.cof[k]:
                _sub_scaled(ring, scof[k], ring.neg(ca), sa, a.cof[k])
            if b.cof[k]:
                _sub_scaled(ring, scof[k], cb, sb, b.cof[k])
        rem, rcof = _reduce(ring, s, basis, scof)
        if not rem:
            continue
        basis.append(_Elem(rem, rcof))
        new = len(basis) - 1
        pairs.extend((k, new) for k in range(new))
        if not any(rem.keys() - {zero_n}):
            break  # unit ideal

    # minimalize
    keep = []
    for idx, g in enumerate(basis):
        dominated = False
        for jdx, h in enumerate(basis):
            if jdx == idx:
                continue
            if monomial_divides(h.lm, g.lm) and (h.lm != g.lm or jdx < idx):
                dominated = True
                break
        if not dominated:
            keep.append(g)
    # interreduce and normalize
    final = []
    for idx, g in enumerate(keep):
        others = [h for k, h in enumerate(keep) if k != idx]
        inv = ring.inv(g.lc)
        lead_terms = {g.lm: g.lc}
        tail = {e: c for e, c in g.terms.items() if e != g.lm}
        tail_cof = [dict(c) for c in g.cof]
        rem, rcof = _reduce(ring, tail, others, tail_cof)
        rem.update(lead_terms)
        terms = {e: ring.mul(inv, c) for e, c in rem.items()}
        cof = [{e: ring.mul(inv, c) for e, c in cd.items()} for cd in rcof]
        final.append((terms, cof))
    final.sort(key=lambda t: degrevlex_key(_lead(t[0])))
    polys = [Poly(ring, n, t, canonical=True) for t, _ in final]
    cofs = [[Poly(ring, n, c, canonical=True) for c in cs] for _, cs in final]
    return GroebnerBasis(ring, n, gens, polys, cofs)

"""Dense linear algebra on ring payloads.

Matrices are lists of rows of payloads of a given :class:`Ring`.  Elimination
routines need a field; determinant and inverse work over any commutative ring
(cofactor expansion, so only for small sizes).
"""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

from .errors import MatrixNotInvertible, MatrixNotUnimodular, NotAUnit
from .rings import Integers, Ring


def identity(ring: Ring, n: int):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def mat_mul(ring: Ring, A, B):
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [
        [ring.sum(ring.mul(row[k], B[k][j]) for k in range(inner)) for j in range(cols)]
        for row in A
    ]


def mat_vec(ring: Ring, A, v):
    return [ring.sum(ring.mul(a, x) for a, x in zip(row, v)) for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)] if A else []


def is_symmetric(ring: Ring, A) -> bool:
    n = len(A)
    return all(A[i][j] == A[j][i] for i in range(n) for j in range(i + 1, n))


def _perm_sign(p) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det(ring: Ring, A) -> object:
    n = len(A)
    if n == 0:
        return ring.one
    if ring.is_field:
        return _det_field(ring, A)
    if n > 6:
        raise ValueError("cofactor determinant limited to n <= 6 over non-fields")
    total = ring.zero
    for p in permutations(range(n)):
        term = ring.one
        for i in range(n):
            term = ring.mul(term, A[i][p[i]])
            if ring.is_zero(term):
                break
        else:
            total = ring.add(total, term) if _perm_sign(p) > 0 else ring.sub(total, term)
    return total


def _det_field(ring: Ring, A):
    M = [list(r) for r in A]
    n = len(M)
    result = ring.one
    for col in range(n):
        piv = next((r for r in range(col, n) if not ring.is_zero(M[r][col])), None)
        if piv is None:
            return ring.zero
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            result = ring.neg(result)
        result = ring.mul(result, M[col][col])
        inv = ring.inv(M[col][col])
        for r in range(col + 1, n):
            if ring.is_zero(M[r][col]):
                continue
            factor = ring.mul(M[r][col], inv)
            M[r] = [ring.sub(a, ring.mul(factor, b)) for a, b in zip(M[r], M[col])]
    return result


def _minor(A, i, j):
    return [row[:j] + row[j + 1:] for k, row in enumerate(A) if k != i]


def inverse(ring: Ring, A):
    """Inverse over ``ring``; raises if the determinant is not a unit."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    d = det(ring, A)
    try:
        dinv = ring.inv(d)
    except NotAUnit:
        if isinstance(ring, Integers) and d != 0:
            raise MatrixNotUnimodular(f"determinant {d} is not +-1") from None
        raise MatrixNotInvertible(f"determinant {ring.fmt(d)} is not a unit in {ring}") from None
    if ring.is_field:
        return _inverse_field(ring, A)
    if n == 1:
        return [[dinv]]
    adj = [[ring.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = det(ring, _minor(A, i, j))
            if (i + j) & 1:
                c = ring.neg(c)
            adj[j][i] = ring.mul(c, dinv)
    return adj


def _inverse_field(ring: Ring, A):
    n = len(A)
    aug = [list(row) + identity(ring, n)[i] for i, row in enumerate(A)]
    reduced, pivots = rref(ring, aug)
    if pivots[:n] != list(range(n)):
        raise MatrixNotInvertible("singular matrix")
    return [row[n:] for row in reduced[:n]]


def rref(ring: Ring, A):
    """Reduced row echelon form over a field; returns (matrix, pivot columns)."""
    M = [list(r) for r in A]
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((k for k in range(r, rows) if not ring.is_zero(M[k][c])), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = ring.inv(M[r][c])
        M[r] = [ring.mul(inv, x) for x in M[r]]
        for k in range(rows):
            if k != r and not ring.is_zero(M[k][c]):
                factor = M[k][c]
                M[k] = [ring.sub(a, ring.mul(factor, b)) for a, b in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(ring: Ring, A) -> int:
    if not A:
        return 0
    return len(rref(ring, A)[1])


def nullspace(ring: Ring, A, ncols: int | None = None):
    """Basis of ``{v : A v = 0}`` over a field."""
    ncols = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[ring.one if i == j else ring.zero for i in range(ncols)] for j in range(ncols)]
    M, pivots = rref(ring, A)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ring.zero] * ncols
        v[fc] = ring.one
        for row, pc in zip(M, pivots):
            v[pc] = ring.neg(row[fc])
        basis.append(v)
    return basis


def solve(ring: Ring, A, b: Sequence):
    """One solution of ``A v = b`` over a field, or None if inconsistent."""
    ncols = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    M, pivots = rref(ring, aug)
    if ncols in pivots:
        return None
    v = [ring.zero] * ncols
    for row, pc in zip(M, pivots):
        v[pc] = row[ncols]
    return v

"""Independent reference computations used to freeze expected values.

Nothing here calls the package's own normal forms: minors are expanded
with Fraction-free Bareiss elimination and searches are brute force.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np


def det(rows) -> int:
    """Bareiss elimination on a small integer matrix."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def determinantal_divisors(a) -> list[int]:
    """``D_k`` = gcd of all k x k minors, for k = 1..rank."""
    a = [list(map(int, r)) for r in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                g = gcd(g, det([[a[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        out.append(g)
    return out


def invariant_factors(a) -> list[int]:
    """Nonzero Smith invariants ``D_k / D_{k-1}``."""
    d = determinantal_divisors(a)
    return [d[0]] + [d[i] // d[i - 1] for i in range(1, len(d))] if d else []


def box(dim: int, bound: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(-bound, bound + 1), repeat=dim)), dtype=np.int64)


def brute_kernel(a, bound: int = 5) -> np.ndarray:
    """All nonzero box vectors ``x`` with ``a x = 0`` (as rows)."""
    a = np.array(a, dtype=np.int64)
    vecs = box(a.shape[1], bound)
    hit = ~(vecs @ a.T).any(axis=1) if a.shape[0] else np.ones(len(vecs), dtype=bool)
    hit &= vecs.any(axis=1)
    return vecs[hit]


def brute_solve(a, b, bound: int = 5):
    """Some box vector ``x`` with ``a x = b`` or ``None``."""
    a = np.array(a, dtype=np.int64)
    b = np.array(b, dtype=np.int64).reshape(-1)
    vecs = box(a.shape[1], bound)
    ok = ((vecs @ a.T) == b).all(axis=1)
    idx = np.flatnonzero(ok)
    return vecs[idx[0]] if len(idx) else None


def in_lattice(basis, v) -> bool:
    """Whether integer ``v`` is an integer combination of the columns."""
    basis = np.array(basis, dtype=object)
    v = [int(x) for x in v]
    if basis.size == 0:
        return not any(v)
    # Hermite-style reduction by hand (no package code)
    cols = [list(map(int, basis[:, j])) for j in range(basis.shape[1])]
    rows = len(v)
    r = 0
    for c in range(rows):
        piv = [j for j in range(r, len(cols)) if cols[j][c]]
        while len(piv) > 1:
            piv.sort(key=lambda j: abs(cols[j][c]))
            p = piv[0]
            for j in piv[1:]:
                q = cols[j][c] // cols[p][c]
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[p])]
            piv = [j for j in range(r, len(cols)) if cols[j][c]]
        if piv:
            p = piv[0]
            cols[r], cols[p] = cols[p], cols[r]
            if v[c] % cols[r][c]:
                return False
            q = v[c] // cols[r][c]
            v = [x - q * y for x, y in zip(v, cols[r])]
            r += 1
        elif v[c]:
            return False
    return not any(v)


def group_ring_product(mul, x, y) -> list[int]:
    """Convolution in Z[G] straight from the multiplication table."""
    n = len(mul)
    out = [0] * n
    for a in range(n):
        for b in range(n):
            out[mul[a][b]] += x[a] * y[b]
    return out

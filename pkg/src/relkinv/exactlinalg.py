"""Exact integer matrix algebra.

Every matrix is a 2-d numpy array with ``dtype=object`` holding Python ints,
so arithmetic never overflows.  The echelon and Smith routines work on plain
lists of rows internally and pivot deterministically: the entry of smallest
nonzero absolute value wins, ties go to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

_INT64_SAFE = 1 << 62


def as_matrix(data, shape: Optional[tuple[int, int]] = None) -> np.ndarray:
    """Coerce ``data`` to a 2-d object array of Python ints."""
    if isinstance(data, np.ndarray) and data.dtype == object and data.ndim == 2:
        arr = data
    else:
        arr = np.array(data, dtype=object)
        if arr.size == 0 and shape is None:
            arr = arr.reshape(arr.shape[0] if arr.ndim else 0, 0)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if arr.size and not isinstance(arr.flat[0], int):
        arr = np.vectorize(int, otypes=[object])(arr)
    return arr


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64).astype(object)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64).astype(object)


def max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(x)) for x in a.flat))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product; uses an int64 kernel when overflow is impossible."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.size == 0 or b.size == 0:
        return zeros(a.shape[0], b.shape[1])
    bound = max_abs(a) * max_abs(b) * a.shape[1]
    if bound < _INT64_SAFE:
        prod = a.astype(np.int64) @ b.astype(np.int64)
        return prod.astype(object)
    return a.dot(b)


def block(rows: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """``np.block`` that keeps object dtype and tolerates empty blocks."""
    return as_matrix(np.block([[as_matrix(m) for m in row] for row in rows]))


# ---------------------------------------------------------------------------
# Echelon form


@dataclass(frozen=True)
class ColumnEchelon:
    """``A @ U == H`` with ``U`` unimodular and ``H`` in column echelon form.

    Column ``r < rank`` of ``H`` has its first nonzero entry (positive) in
    row ``pivots[r]``; the pivot rows increase strictly and the columns from
    ``rank`` on are zero.
    """

    H: np.ndarray
    U: np.ndarray
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def column_echelon(a) -> ColumnEchelon:
    a = as_matrix(a)
    m, n = a.shape
    # Row operations on the transpose, tracked in w: w @ a.T == t.
    t = [list(row) for row in a.T]
    w = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    pivots: list[int] = []
    r = 0
    for c in range(m):
        if r == n:
            break
        while True:
            best = None
            for i in range(r, n):
                v = t[i][c]
                if v and (best is None or abs(v) < abs(t[best][c])):
                    best = i
            if best is None:
                break
            if best != r:
                t[r], t[best] = t[best], t[r]
                w[r], w[best] = w[best], w[r]
            p = t[r][c]
            done = True
            for i in range(r + 1, n):
                v = t[i][c]
                if v:
                    q = v // p
                    ti, tr = t[i], t[r]
                    for k in range(c, m):
                        if tr[k]:
                            ti[k] -= q * tr[k]
                    wi, wr = w[i], w[r]
                    for k in range(n):
                        if wr[k]:
                            wi[k] -= q * wr[k]
                    if ti[c]:
                        done = False
            if done:
                break
        if r < n and t[r][c]:
            if t[r][c] < 0:
                t[r] = [-x for x in t[r]]
                w[r] = [-x for x in w[r]]
            p = t[r][c]
            # Hermite reduction above the pivot keeps entries small.
            for i in range(r):
                v = t[i][c]
                if v:
                    q = v // p
                    if q:
                        ti, tr = t[i], t[r]
                        for k in range(c, m):
                            if tr[k]:
                                ti[k] -= q * tr[k]
                        wi, wr = w[i], w[r]
                        for k in range(n):
                            if wr[k]:
                                wi[k] -= q * wr[k]
            pivots.append(c)
            r += 1
    H = as_matrix(t, (n, m)).T.copy() if n and m else zeros(m, n)
    U = as_matrix(w, (n, n)).T.copy() if n else zeros(0, 0)
    return ColumnEchelon(H=H, U=U, pivots=tuple(pivots))


def kernel_basis(a) -> np.ndarray:
    """Columns form a saturated Z-basis of ``{x : a @ x == 0}``."""
    a = as_matrix(a)
    ech = column_echelon(a)
    return ech.U[:, ech.rank:].copy()


def image_basis(a) -> np.ndarray:
    """Columns form a Z-basis of the column lattice of ``a``."""
    ech = column_echelon(a)
    return ech.H[:, : ech.rank].copy()


def rank(a) -> int:
    return column_echelon(a).rank


def solve_integer_system(a, b) -> Optional[np.ndarray]:
    """Return some integer ``X`` with ``a @ X == b``, or ``None``.

    The returned solution is the canonical one produced by the echelon form
    (free coordinates set to zero), so identical inputs give identical output.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch: A has {a.shape[0]} rows, B has {b.shape[0]}"
        )
    m, n = a.shape
    k = b.shape[1]
    if k == 0:
        return zeros(n, 0)
    if n == 0:
        return zeros(0, k) if not any(b.flat) else None
    ech = column_echelon(a)
    H, U = ech.H, ech.U
    y = zeros(n, k)
    for r, p in enumerate(ech.pivots):
        rhs = b[p, :].copy()
        if r:
            rhs = rhs - H[p, :r].dot(y[:r, :])
        piv = H[p, r]
        for j in range(k):
            v = rhs[j]
            if v % piv:
                return None
            y[r, j] = v // piv
    if ech.rank < m:
        # Rows that carry no pivot must already match.
        resid = b - matmul(H[:, : ech.rank], y[: ech.rank, :])
        if any(resid.flat):
            return None
    x = matmul(U, y)
    return x


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == S`` with unimodular ``U`` and ``V``."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.S.shape)
        return [int(self.S[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(m) -> SmithDecomposition:
    m = as_matrix(m)
    rows, cols = m.shape
    s = [list(r) for r in m]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    # v is kept transposed so column operations become row operations.
    vt = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_op(i, r, q):  # row_i -= q * row_r
        si, sr = s[i], s[r]
        for k in range(cols):
            if sr[k]:
                si[k] -= q * sr[k]
        ui, ur = u[i], u[r]
        for k in range(rows):
            if ur[k]:
                ui[k] -= q * ur[k]

    def col_op(j, c, q):  # col_j -= q * col_c
        for row in s:
            if row[c]:
                row[j] -= q * row[c]
        vj, vc = vt[j], vt[c]
        for k in range(cols):
            if vc[k]:
                vj[k] -= q * vc[k]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        vt[i], vt[j] = vt[j], vt[i]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = s[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            p = s[t][t]
            clean = True
            for i in range(t + 1, rows):
                if s[i][t]:
                    row_op(i, t, s[i][t] // p)
                    if s[i][t]:
                        clean = False
            for j in range(t + 1, cols):
                if s[t][j]:
                    col_op(j, t, s[t][j] // p)
                    if s[t][j]:
                        clean = False
            if clean:
                # Divisibility: fold a non-multiple into the pivot row.
                bad = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if s[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                row_op(t, bad, -1)
                continue
            # A remainder appeared; move the smallest entry of row/col t to pivot.
            best = (abs(s[t][t]), t, t)
            for i in range(t + 1, rows):
                if s[i][t] and abs(s[i][t]) < best[0]:
                    best = (abs(s[i][t]), i, t)
            for j in range(t + 1, cols):
                if s[t][j] and abs(s[t][j]) < best[0]:
                    best = (abs(s[t][j]), t, j)
            swap_rows(t, best[1])
            swap_cols(t, best[2])
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    U = as_matrix(u, (rows, rows)) if rows else zeros(0, 0)
    S = as_matrix(s, (rows, cols)) if rows and cols else zeros(rows, cols)
    V = as_matrix(vt, (cols, cols)).T.copy() if cols else zeros(0, 0)
    return SmithDecomposition(U=U, S=S, V=V)


@dataclass(frozen=True)
class Cokernel:
    """``Z^m / im(A)`` as ``sum Z/factors[i]`` (0 means a free summand).

    ``projection`` maps an ambient vector to its coordinates on the
    generators; coordinate ``i`` is only defined modulo ``factors[i]``.
    """

    factors: tuple[int, ...]
    projection: np.ndarray

    @property
    def nontrivial(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d != 1)


def cokernel_presentation(a) -> Cokernel:
    a = as_matrix(a)
    snf = smith_normal_form(a)
    diag = snf.diagonal
    factors = [diag[i] if i < len(diag) else 0 for i in range(a.shape[0])]
    return Cokernel(factors=tuple(factors), projection=snf.U)


# ---------------------------------------------------------------------------
# Lattice helpers


def left_inverse(basis) -> np.ndarray:
    """Integer ``W`` with ``W @ basis == I`` for a saturated column basis."""
    basis = as_matrix(basis)
    n, g = basis.shape
    sol = solve_integer_system(basis.T, identity(g))
    if sol is None:
        raise ValueError("basis is not saturated; no integer left inverse")
    return sol.T.copy()


def determinant(m) -> int:
    """Bareiss fraction-free determinant."""
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(m) -> bool:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        return False
    if n <= 12:
        return abs(determinant(m)) == 1
    return solve_integer_system(m, identity(n)) is not None


@dataclass(frozen=True)
class Subquotient:
    """``N / S`` for lattices ``S <= N``, generators with nontrivial order.

    ``factors[i]`` is the order of ``representatives[:, i]`` in the quotient
    (0 for infinite order).
    """

    factors: tuple[int, ...]
    representatives: np.ndarray


def subquotient(big_gens, small_gens) -> Subquotient:
    """Structure of ``span(big_gens) / span(small_gens)``.

    ``small_gens`` must lie in the lattice spanned by ``big_gens``.
    """
    big_gens = as_matrix(big_gens)
    small_gens = as_matrix(small_gens)
    nbig = image_basis(big_gens)
    g = nbig.shape[1]
    if g == 0:
        return Subquotient((), zeros(big_gens.shape[0], 0))
    coords = solve_integer_system(nbig, small_gens)
    if coords is None:
        raise ValueError("sublattice is not contained in the ambient lattice")
    snf = smith_normal_form(coords)
    diag = snf.diagonal
    factors = [diag[i] if i < len(diag) else 0 for i in range(g)]
    uinv = solve_integer_system(snf.U, identity(g))
    reps = matmul(nbig, uinv)
    keep = [i for i, d in enumerate(factors) if d != 1]
    return Subquotient(tuple(factors[i] for i in keep), reps[:, keep].copy())

"""Finite groups, the integral group ring and matrices over it.

A :class:`GroupRingMatrix` with ``rows x cols`` entries represents a map of
free left modules ``Z[G]^cols -> Z[G]^rows``: the basis vector ``e_j`` goes to
``sum_i a_ij e_i`` and a scalar ``x`` acts on the left, so ``x e_j`` goes to
``sum_i (x a_ij) e_i``.  Composition therefore multiplies ring entries in
reversed order, which matters for nonabelian groups.

Flattening uses the Z-basis ``{g e_i}`` ordered block by block: index
``i * |G| + g``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .exactlinalg import as_matrix, kernel_basis, matmul, solve_integer_system, zeros


class GroupTableError(ValueError):
    """A multiplication table violates a group axiom."""


class NotAssociativeError(GroupTableError):
    pass


class NoIdentityError(GroupTableError):
    pass


class NoInverseError(GroupTableError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table (index 0 is 1)."""

    mul: tuple[tuple[int, ...], ...]
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.mul)

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        return tuple(row.index(0) for row in self.mul)

    @cached_property
    def mul_array(self) -> np.ndarray:
        return np.array(self.mul, dtype=np.int64).reshape(self.order, self.order)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.mul == other.mul

    def __hash__(self):
        return hash(self.mul)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{label} of order {self.order}>"

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul[x][g]
            k += 1
        return k

    def to_json(self) -> dict:
        return {"order": self.order, "mul": [list(r) for r in self.mul]}


def group_from_table(table: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    """Validate a multiplication table and build the group.

    Raises a distinct :class:`GroupTableError` subclass for a table that is
    not associative, has no identity at index 0, or lacks an inverse.
    """
    n = len(table)
    if n == 0:
        raise GroupTableError("empty table")
    rows = []
    for row in table:
        if len(row) != n:
            raise GroupTableError("table is not square")
        for x in row:
            if not (isinstance(x, (int, np.integer)) and 0 <= x < n):
                raise GroupTableError(f"entry {x!r} out of range")
        rows.append(tuple(int(x) for x in row))
    mul = tuple(rows)
    for a in range(n):
        if mul[0][a] != a or mul[a][0] != a:
            raise NoIdentityError("index 0 is not a two-sided identity")
    for a in range(n):
        right = [b for b in range(n) if mul[a][b] == 0]
        if not right or mul[right[0]][a] != 0:
            raise NoInverseError(f"no inverse for element {a}")
    for a, b, c in itertools.product(range(n), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            raise NotAssociativeError(f"({a}*{b})*{c} != {a}*({b}*{c})")
    return FiniteGroup(mul, name)


def group_from_json(data: dict) -> FiniteGroup:
    if "mul" not in data:
        raise GroupTableError("group JSON needs a 'mul' table")
    g = group_from_table(data["mul"], data.get("name", ""))
    if "order" in data and data["order"] != g.order:
        raise GroupTableError("'order' disagrees with the table size")
    return g


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), "1")


def cyclic_group(n: int) -> FiniteGroup:
    """``C_n`` with element ``k`` standing for ``x^k``."""
    return FiniteGroup(
        tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"C{n}"
    )


def klein_four_group() -> FiniteGroup:
    # Elements are bit pairs; multiplication is xor.
    return FiniteGroup(tuple(tuple(a ^ b for b in range(4)) for a in range(4)), "V4")


def symmetric_group(k: int) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x)); perms[0] is the identity.
    mul = tuple(
        tuple(index[tuple(p[q[x]] for x in range(k))] for q in perms) for p in perms
    )
    return FiniteGroup(mul, f"S{k}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    m = h.order
    mul = tuple(
        tuple(
            g.mul[a // m][b // m] * m + h.mul[a % m][b % m]
            for b in range(g.order * m)
        )
        for a in range(g.order * m)
    )
    return FiniteGroup(mul, f"{g.name}x{h.name}")


@dataclass(frozen=True, eq=False)
class GroupIso:
    """A group isomorphism given as an index permutation."""

    source: FiniteGroup
    target: FiniteGroup
    mapping: tuple[int, ...]

    def __post_init__(self):
        n = self.source.order
        if self.target.order != n or sorted(self.mapping) != list(range(n)):
            raise ValueError("mapping is not a bijection between the groups")
        s, t, u = self.source.mul, self.target.mul, self.mapping
        for a in range(n):
            for b in range(n):
                if u[s[a][b]] != t[u[a]][u[b]]:
                    raise ValueError(
                        f"not a homomorphism: u({a}*{b}) != u({a})*u({b})"
                    )

    def __call__(self, g: int) -> int:
        return self.mapping[g]

    def inverse(self) -> "GroupIso":
        inv = [0] * len(self.mapping)
        for a, b in enumerate(self.mapping):
            inv[b] = a
        return GroupIso(self.target, self.source, tuple(inv))

    def __eq__(self, other):
        return (
            isinstance(other, GroupIso)
            and self.source == other.source
            and self.target == other.target
            and self.mapping == other.mapping
        )

    def __hash__(self):
        return hash(self.mapping)


def identity_iso(g: FiniteGroup) -> GroupIso:
    return GroupIso(g, g, tuple(range(g.order)))


# ---------------------------------------------------------------------------
# Group ring elements


@dataclass(frozen=True, eq=False)
class GroupRingElement:
    group: FiniteGroup
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.group.order:
            raise ValueError("coefficient vector length must equal the group order")

    @classmethod
    def from_dict(cls, group: FiniteGroup, terms: dict[int, int]) -> "GroupRingElement":
        c = [0] * group.order
        for g, a in terms.items():
            c[g] += a
        return cls(group, tuple(c))

    @classmethod
    def basis(cls, group: FiniteGroup, g: int) -> "GroupRingElement":
        return cls.from_dict(group, {g: 1})

    def __add__(self, other):
        return GroupRingElement(
            self.group, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self):
        return GroupRingElement(self.group, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement(self.group, tuple(other * a for a in self.coeffs))
        return GroupRingElement(self.group, tuple(ring_mul(self.group, self.coeffs, other.coeffs)))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, GroupRingElement)
            and self.group == other.group
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs)

    def augmentation(self) -> int:
        return sum(self.coeffs)

    def __repr__(self):
        terms = [f"{a}*g{g}" for g, a in enumerate(self.coeffs) if a]
        return " + ".join(terms) if terms else "0"


def ring_mul(group: FiniteGroup, x: Sequence[int], y: Sequence[int]) -> list[int]:
    out = [0] * group.order
    for g, a in enumerate(x):
        if a:
            row = group.mul[g]
            for h, b in enumerate(y):
                if b:
                    out[row[h]] += a * b
    return out


# ---------------------------------------------------------------------------
# Matrices over Z[G]


class GroupRingMatrix:
    """A homomorphism ``Z[G]^cols -> Z[G]^rows`` of free left modules.

    ``coeffs`` has shape ``(rows, cols, |G|)``; ``coeffs[i, j, g]`` is the
    coefficient of ``g`` in the entry ``a_ij``.
    """

    __slots__ = ("group", "coeffs", "_flat")

    def __init__(self, group: FiniteGroup, coeffs):
        arr = np.asarray(coeffs, dtype=object)
        if arr.ndim != 3 or arr.shape[2] != group.order:
            raise ValueError(
                f"coefficient array must have shape (rows, cols, {group.order})"
            )
        self.group = group
        self.coeffs = arr
        self._flat = None

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, group: FiniteGroup, rows: int, cols: int) -> "GroupRingMatrix":
        return cls(group, np.zeros((rows, cols, group.order), dtype=np.int64).astype(object))

    @classmethod
    def identity(cls, group: FiniteGroup, n: int) -> "GroupRingMatrix":
        m = cls.zero(group, n, n)
        for i in range(n):
            m.coeffs[i, i, 0] = 1
        return m

    @classmethod
    def from_entries(cls, group: FiniteGroup, entries) -> "GroupRingMatrix":
        """Build from a nested list of coefficient vectors or ring elements."""
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        m = cls.zero(group, rows, cols)
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise ValueError("ragged matrix")
            for j, e in enumerate(row):
                c = e.coeffs if isinstance(e, GroupRingElement) else e
                if len(c) != group.order:
                    raise ValueError("entry length must equal the group order")
                m.coeffs[i, j, :] = [int(x) for x in c]
        return m

    @classmethod
    def from_columns(cls, group: FiniteGroup, colform, rows: int) -> "GroupRingMatrix":
        """Inverse of :meth:`column_form`."""
        colform = as_matrix(colform)
        n = group.order
        cols = colform.shape[1]
        arr = colform.reshape(rows, n, cols).transpose(0, 2, 1)
        return cls(group, arr.copy())

    @classmethod
    def from_integers(cls, group: FiniteGroup, ints) -> "GroupRingMatrix":
        """Integer matrix viewed as scalars times the identity element."""
        ints = as_matrix(ints)
        m = cls.zero(group, *ints.shape)
        m.coeffs[:, :, 0] = ints
        return m

    # shape ------------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[:2]

    def entry(self, i: int, j: int) -> GroupRingElement:
        return GroupRingElement(self.group, tuple(int(x) for x in self.coeffs[i, j]))

    def __repr__(self):
        return f"GroupRingMatrix({self.rows}x{self.cols} over {self.group!r})"

    # linear structure ---------------------------------------------------------

    def _check(self, other: "GroupRingMatrix"):
        if self.group != other.group:
            raise ValueError("group mismatch")

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return GroupRingMatrix(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return GroupRingMatrix(self.group, self.coeffs - other.coeffs)

    def __neg__(self) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, -self.coeffs)

    def scale(self, k: int) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, self.coeffs * k)

    def __eq__(self, other):
        return (
            isinstance(other, GroupRingMatrix)
            and self.group == other.group
            and self.shape == other.shape
            and bool((self.coeffs == other.coeffs).all())
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.coeffs.flat)

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        return gr_compose(self, other)

    # block structure ----------------------------------------------------------

    def take_columns(self, idx: Sequence[int]) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, self.coeffs[:, list(idx), :].reshape(self.rows, len(idx), self.group.order))

    def take_rows(self, idx: Sequence[int]) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, self.coeffs[list(idx), :, :].reshape(len(idx), self.cols, self.group.order))

    def copy(self) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, self.coeffs.copy())

    # flattened forms ----------------------------------------------------------

    def column_form(self) -> np.ndarray:
        """Integer matrix whose column ``j`` is the image of ``e_j``."""
        n = self.group.order
        return as_matrix(
            self.coeffs.transpose(0, 2, 1).reshape(self.rows * n, self.cols),
            (self.rows * n, self.cols),
        )

    def flatten(self) -> np.ndarray:
        if self._flat is None:
            self._flat = flatten(self)
        return self._flat

    def transported(self, iso: GroupIso) -> "GroupRingMatrix":
        """Same matrix read over ``iso.source`` via restriction along ``iso``.

        An entry ``sum a_h h`` over the target becomes ``sum a_h u^-1(h)``.
        """
        if iso.target != self.group:
            raise ValueError("isomorphism target must be the matrix group")
        perm = list(iso.mapping)
        return GroupRingMatrix(iso.source, self.coeffs[:, :, perm].copy())


def block_matrix(group: FiniteGroup, blocks: Sequence[Sequence[GroupRingMatrix]]) -> GroupRingMatrix:
    rows = [np.concatenate([b.coeffs for b in row], axis=1) for row in blocks]
    return GroupRingMatrix(group, np.concatenate(rows, axis=0))


def flatten(a: GroupRingMatrix) -> np.ndarray:
    """Regular representation: the Z-matrix of ``a`` in the basis ``{g e_j}``."""
    g = a.group
    n = g.order
    out = np.zeros((a.rows * n, a.cols * n), dtype=object)
    out[...] = 0
    mul = g.mul_array
    # Column (j, gamma) is gamma * (column j); row (i, gamma*h) gets a_ij[h].
    for gamma in range(n):
        rows_idx = mul[gamma]  # h -> gamma*h
        for i in range(a.rows):
            out[i * n + rows_idx, gamma::n] = a.coeffs[i, :, :].T
    return out


def gr_compose(a: GroupRingMatrix, b: GroupRingMatrix) -> GroupRingMatrix:
    """The composite ``a o b`` (apply ``b`` first)."""
    if a.group != b.group:
        raise ValueError("group mismatch")
    if a.cols != b.rows:
        raise ValueError(f"cannot compose {a.shape} with {b.shape}")
    if b.cols == 0 or a.rows == 0:
        return GroupRingMatrix.zero(a.group, a.rows, b.cols)
    prod = matmul(a.flatten(), b.column_form())
    return GroupRingMatrix.from_columns(a.group, prod, a.rows)


def act_on_vectors(group: FiniteGroup, gamma: int, vecs: np.ndarray, rank: int) -> np.ndarray:
    """Left multiplication by ``gamma`` on flattened vectors (as columns)."""
    n = group.order
    mul = group.mul_array[gamma]
    # new[(i, gamma*h)] = old[(i, h)]
    out = np.empty_like(vecs)
    for i in range(rank):
        out[i * n + mul] = vecs[i * n : (i + 1) * n]
    return out


def solve_equivariant(
    a: GroupRingMatrix,
    b: GroupRingMatrix,
    rng: Optional[np.random.Generator] = None,
    spread: int = 2,
) -> Optional[GroupRingMatrix]:
    """Some ``X`` over ``Z[G]`` with ``a o X == b``, or ``None``.

    Column ``j`` of ``X`` is the image of ``e_j``; solving for it in the
    flattened basis determines ``X`` as a module map.  With ``rng`` a random
    kernel element (coefficients in ``[-spread, spread]``) is added to every
    column, which gives a different but equally valid lift.
    """
    a._check(b)
    if a.rows != b.rows:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if b.cols == 0:
        return GroupRingMatrix.zero(a.group, a.cols, 0)
    x = solve_integer_system(a.flatten(), b.column_form())
    if x is None:
        return None
    if rng is not None and a.cols:
        ker = kernel_basis(a.flatten())
        if ker.shape[1]:
            coef = rng.integers(-spread, spread + 1, size=(ker.shape[1], b.cols))
            x = x + matmul(ker, as_matrix(coef.tolist(), coef.shape))
    out = GroupRingMatrix.from_columns(a.group, x, a.cols)
    return out


def element_matrix(group: FiniteGroup, x: Sequence[int]) -> GroupRingMatrix:
    return GroupRingMatrix.from_entries(group, [[list(x)]])


def parse_element(group: FiniteGroup, data) -> list[int]:
    """A length-|G| coefficient list, or a ``{index: coeff}`` mapping."""
    if isinstance(data, dict):
        c = [0] * group.order
        for k, v in data.items():
            c[int(k)] += int(v)
        return c
    if len(data) != group.order:
        raise ValueError("group ring entry length must equal the group order")
    return [int(x) for x in data]

"""Free augmented chain complexes over Z[G] and maps between them.

Complexes are finite: ``ranks[i]`` for ``0 <= i <= top``, and every degree
outside that range is the zero module.  ``d(i)`` maps degree ``i`` to
degree ``i - 1``.  Homotopies follow ``f - g = d D + D d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .exactlinalg import as_matrix, zeros
from .groupring import FiniteGroup, GroupRingMatrix, block_matrix


class ChainError(ValueError):
    """Malformed chain-level data."""


class ChainComplex:
    """A free chain complex of left Z[G]-modules with optional augmentation.

    ``aug`` lists the value of the augmentation on each basis element of
    degree 0; it is extended by ``aug(g x) = aug(x)``.
    """

    def __init__(
        self,
        group: FiniteGroup,
        ranks: Sequence[int],
        diffs: Mapping[int, GroupRingMatrix],
        aug: Optional[Sequence[int]] = None,
        name: str = "",
        sub: Optional["SubcomplexMarker"] = None,
    ):
        self.group = group
        self.ranks = tuple(int(r) for r in ranks)
        if any(r < 0 for r in self.ranks):
            raise ChainError("negative rank")
        self._d: dict[int, GroupRingMatrix] = {}
        for i, m in diffs.items():
            i = int(i)
            if not 1 <= i <= self.top:
                if m.rows * m.cols:
                    raise ChainError(f"differential in degree {i} is outside 1..{self.top}")
                continue
            if m.group != group:
                raise ChainError(f"differential d{i} is over a different group")
            if m.shape != (self.rank(i - 1), self.rank(i)):
                raise ChainError(
                    f"d{i} has shape {m.shape}, expected {(self.rank(i - 1), self.rank(i))}"
                )
            self._d[i] = m
        self.aug = None if aug is None else tuple(int(a) for a in aug)
        if self.aug is not None and len(self.aug) != self.rank(0):
            raise ChainError("augmentation length must equal rank in degree 0")
        self.name = name
        self.sub = sub

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i <= self.top else 0

    def d(self, i: int) -> GroupRingMatrix:
        m = self._d.get(i)
        if m is None:
            return GroupRingMatrix.zero(self.group, self.rank(i - 1), self.rank(i))
        return m

    def aug_row(self) -> np.ndarray:
        """The augmentation as a 1 x (rank0 * |G|) integer row."""
        n = self.group.order
        vals = self.aug or (0,) * self.rank(0)
        return as_matrix([[a for a in vals for _ in range(n)]], (1, self.rank(0) * n))

    def identity_map(self) -> "ChainMap":
        return ChainMap(
            self,
            self,
            {i: GroupRingMatrix.identity(self.group, self.rank(i)) for i in range(self.top + 1)},
        )

    def truncated(self, top: int) -> "ChainComplex":
        top = min(top, self.top)
        return ChainComplex(
            self.group,
            self.ranks[: top + 1],
            {i: self.d(i) for i in range(1, top + 1)},
            self.aug,
            self.name,
        )

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<ChainComplex{label} over {self.group!r} ranks={list(self.ranks)}>"

    def same_as(self, other: "ChainComplex") -> bool:
        if self is other:
            return True
        if self.group != other.group or self.ranks != other.ranks or self.aug != other.aug:
            return False
        return all(self.d(i) == other.d(i) for i in range(1, self.top + 1))


AugmentedComplex = ChainComplex


@dataclass(frozen=True, eq=False)
class SubcomplexMarker:
    """Basis indices spanning a subcomplex, per degree.

    Equality ignores degrees with nothing marked.
    """

    indices: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def _key(self):
        return tuple(sorted((int(i), tuple(sorted(v))) for i, v in self.indices.items() if v))

    def __eq__(self, other):
        return isinstance(other, SubcomplexMarker) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @classmethod
    def of(cls, spec: Mapping) -> "SubcomplexMarker":
        return cls({int(k): tuple(sorted(int(x) for x in v)) for k, v in spec.items()})

    @classmethod
    def full(cls, k: ChainComplex) -> "SubcomplexMarker":
        return cls({i: tuple(range(k.rank(i))) for i in range(k.top + 1)})

    @classmethod
    def empty(cls) -> "SubcomplexMarker":
        return cls({})

    @classmethod
    def skeleton(cls, k: ChainComplex, n: int) -> "SubcomplexMarker":
        return cls({i: tuple(range(k.rank(i))) for i in range(min(n, k.top) + 1)})

    def get(self, i: int) -> tuple[int, ...]:
        return tuple(self.indices.get(i, ()))

    def complement(self, k: ChainComplex, i: int) -> tuple[int, ...]:
        marked = set(self.get(i))
        return tuple(j for j in range(k.rank(i)) if j not in marked)

    def is_empty(self) -> bool:
        return not any(self.indices.values())

    def contains(self, other: "SubcomplexMarker") -> bool:
        return all(set(other.get(i)) <= set(self.get(i)) for i in other.indices)

    def to_json(self) -> dict:
        return {str(i): list(v) for i, v in self.indices.items() if v}

    def problems(self, k: ChainComplex) -> list[str]:
        out = []
        for i, idx in self.indices.items():
            if any(not 0 <= j < k.rank(i) for j in idx):
                out.append(f"marked index out of range in degree {i}")
                continue
            if i == 0 or not idx:
                continue
            outside = self.complement(k, i - 1)
            block = k.d(i).coeffs[list(outside)][:, list(idx)] if outside else None
            if block is not None and any(block.flat):
                out.append(f"marked span in degree {i} is not closed under d{i}")
        return out


class ChainMap:
    """Per-degree matrices ``f_i : source_i -> target_i``.

    Degrees without a stored matrix are zero when either module vanishes
    and undefined otherwise; ``bound`` is the last degree with data.
    """

    def __init__(self, source: ChainComplex, target: ChainComplex, maps: Mapping[int, GroupRingMatrix], bound: Optional[int] = None):
        self.source = source
        self.target = target
        self.maps: dict[int, GroupRingMatrix] = {}
        for i, m in maps.items():
            if m.shape != (target.rank(i), source.rank(i)):
                raise ChainError(
                    f"map in degree {i} has shape {m.shape}, expected {(target.rank(i), source.rank(i))}"
                )
            self.maps[int(i)] = m
        if bound is None:
            bound = max(self.maps, default=-1)
        self.bound = bound

    def __getitem__(self, i: int) -> GroupRingMatrix:
        m = self.maps.get(i)
        if m is not None:
            return m
        if i > self.bound and self.source.rank(i) and self.target.rank(i):
            raise KeyError(f"chain map has no data in degree {i}")
        return GroupRingMatrix.zero(self.source.group, self.target.rank(i), self.source.rank(i))

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        top = min(self.bound, other.bound)
        return ChainMap(
            other.source,
            self.target,
            {i: self[i] @ other[i] for i in range(top + 1)},
            top,
        )

    def __add__(self, other: "ChainMap") -> "ChainMap":
        top = min(self.bound, other.bound)
        return ChainMap(self.source, self.target, {i: self[i] + other[i] for i in range(top + 1)}, top)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        top = min(self.bound, other.bound)
        return ChainMap(self.source, self.target, {i: self[i] - other[i] for i in range(top + 1)}, top)

    def truncated(self, top: int) -> "ChainMap":
        return ChainMap(self.source, self.target, {i: self[i] for i in range(top + 1)}, top)

    def chain_law_failures(self, lo: int = 1, hi: Optional[int] = None) -> list[int]:
        hi = self.bound if hi is None else hi
        bad = []
        for i in range(max(lo, 1), hi + 1):
            if self.target.d(i) @ self[i] != self[i - 1] @ self.source.d(i):
                bad.append(i)
        return bad

    def preserves_augmentation(self) -> bool:
        if self.source.aug is None or self.target.aug is None:
            return False
        f0 = self[0]
        n = self.source.group.order
        for j in range(self.source.rank(0)):
            val = sum(
                self.target.aug[i] * sum(f0.coeffs[i, j, :]) for i in range(self.target.rank(0))
            )
            if val != self.source.aug[j]:
                return False
        return True

    def is_chain_map(self, hi: Optional[int] = None) -> bool:
        return not self.chain_law_failures(1, hi)


class ChainHomotopy:
    """Per-degree ``D_i : source_i -> target_{i+1}``."""

    def __init__(self, source: ChainComplex, target: ChainComplex, maps: Mapping[int, GroupRingMatrix]):
        self.source = source
        self.target = target
        self.maps = {}
        for i, m in maps.items():
            if m.shape != (target.rank(i + 1), source.rank(i)):
                raise ChainError(
                    f"homotopy in degree {i} has shape {m.shape}, expected {(target.rank(i + 1), source.rank(i))}"
                )
            self.maps[int(i)] = m

    def __getitem__(self, i: int) -> GroupRingMatrix:
        m = self.maps.get(i)
        if m is None:
            return GroupRingMatrix.zero(self.source.group, self.target.rank(i + 1), self.source.rank(i))
        return m

    def failures(self, f: ChainMap, g: ChainMap, degrees: Iterable[int]) -> list[int]:
        """Degrees where ``f - g == d D + D d`` fails."""
        bad = []
        for i in degrees:
            lhs = f[i] - g[i]
            rhs = self.target.d(i + 1) @ self[i] + self[i - 1] @ self.source.d(i)
            if lhs != rhs:
                bad.append(i)
        return bad

    def witnesses(self, f: ChainMap, g: ChainMap, degrees: Iterable[int]) -> bool:
        return not self.failures(f, g, degrees)

    def __add__(self, other: "ChainHomotopy") -> "ChainHomotopy":
        keys = set(self.maps) | set(other.maps)
        return ChainHomotopy(self.source, self.target, {i: self[i] + other[i] for i in keys})


def zero_homotopy(source: ChainComplex, target: ChainComplex) -> ChainHomotopy:
    return ChainHomotopy(source, target, {})


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def validate_complex(k: ChainComplex, require_aug: bool = True) -> ValidationReport:
    rep = ValidationReport()
    for i in range(2, k.top + 1):
        if not (k.d(i - 1) @ k.d(i)).is_zero():
            rep.failures.append(f"d{i - 1} o d{i} != 0 (degree {i})")
    if k.aug is None:
        if require_aug:
            rep.failures.append("missing augmentation")
    else:
        if k.rank(1):
            if any((k.aug_row().dot(k.d(1).column_form())).flat) if k.rank(0) else False:
                rep.failures.append("aug o d1 != 0 (degree 1)")
        if require_aug and math.gcd(*k.aug, 0) != 1:
            rep.failures.append("augmentation is not surjective onto Z")
    if k.sub is not None:
        rep.failures.extend(k.sub.problems(k))
    return rep


# ---------------------------------------------------------------------------
# Constructions


def inclusion_matrix(group: FiniteGroup, big: int, idx: Sequence[int]) -> GroupRingMatrix:
    m = GroupRingMatrix.zero(group, big, len(idx))
    for col, row in enumerate(idx):
        m.coeffs[row, col, 0] = 1
    return m


def subcomplex(k: ChainComplex, marker: SubcomplexMarker) -> tuple[ChainComplex, ChainMap]:
    """The marked subcomplex ``L`` together with the inclusion ``L -> K``."""
    probs = marker.problems(k)
    if probs:
        raise ChainError("; ".join(probs))
    top = k.top
    ranks = [len(marker.get(i)) for i in range(top + 1)]
    diffs = {}
    for i in range(1, top + 1):
        rows, cols = marker.get(i - 1), marker.get(i)
        diffs[i] = k.d(i).take_rows(rows).take_columns(cols)
    aug = None
    if k.aug is not None:
        aug = [k.aug[j] for j in marker.get(0)]
    sub = ChainComplex(k.group, ranks, diffs, aug, name=f"{k.name}|sub")
    incl = ChainMap(
        sub, k, {i: inclusion_matrix(k.group, k.rank(i), marker.get(i)) for i in range(top + 1)}, top
    )
    return sub, incl


def quotient_complex(k: ChainComplex, marker: SubcomplexMarker) -> tuple[ChainComplex, ChainMap]:
    """``K / L`` on the unmarked basis, with the projection ``K -> K/L``."""
    probs = marker.problems(k)
    if probs:
        raise ChainError("; ".join(probs))
    top = k.top
    keep = [marker.complement(k, i) for i in range(top + 1)]
    diffs = {i: k.d(i).take_rows(keep[i - 1]).take_columns(keep[i]) for i in range(1, top + 1)}
    q = ChainComplex(k.group, [len(x) for x in keep], diffs, None, name=f"{k.name}/sub")
    proj = {}
    for i in range(top + 1):
        proj[i] = GroupRingMatrix.zero(k.group, len(keep[i]), k.rank(i))
        for row, col in enumerate(keep[i]):
            proj[i].coeffs[row, col, 0] = 1
    return q, ChainMap(k, q, proj, top)


@dataclass
class MappingCone:
    """``Cone(f)_n = target_n + source_{n-1}`` with ``[[d, f], [0, -d]]``."""

    complex: ChainComplex
    map: ChainMap

    def split(self, n: int) -> tuple[int, int]:
        """Ranks of the two summands in degree ``n``."""
        return self.map.target.rank(n), self.map.source.rank(n - 1)

    def inclusion(self, n: int) -> GroupRingMatrix:
        a, b = self.split(n)
        return inclusion_matrix(self.complex.group, a + b, range(a))

    def projection(self, n: int) -> GroupRingMatrix:
        a, b = self.split(n)
        m = GroupRingMatrix.zero(self.complex.group, b, a + b)
        for j in range(b):
            m.coeffs[j, a + j, 0] = 1
        return m


def mapping_cone(f: ChainMap, top: Optional[int] = None) -> MappingCone:
    src, tgt = f.source, f.target
    group = tgt.group
    if top is None:
        top = tgt.top
    top = min(top, tgt.top)
    ranks = [tgt.rank(n) + src.rank(n - 1) for n in range(top + 1)]
    diffs = {}
    for n in range(1, top + 1):
        diffs[n] = block_matrix(
            group,
            [
                [tgt.d(n), f[n - 1]],
                [GroupRingMatrix.zero(group, src.rank(n - 2), tgt.rank(n)), -src.d(n - 1)],
            ],
        )
    cone = ChainComplex(group, ranks, diffs, tgt.aug, name=f"Cone({src.name}->{tgt.name})")
    return MappingCone(cone, f)


@dataclass
class MappingCylinder:
    """``Cyl_n = C_n + K_n + K_{n-1}`` for a chain map ``t : K -> C``.

    ``d(a, b, c) = (d a + t c, d b - c, -d c)``.  The middle summand is a
    subcomplex, the quotient by it is ``Cone(t)`` with the same signs, and
    ``a + t b`` retracts onto ``C``.
    """

    complex: ChainComplex
    map: ChainMap

    def split(self, n: int) -> tuple[int, int, int]:
        return self.map.target.rank(n), self.map.source.rank(n), self.map.source.rank(n - 1)

    def middle(self) -> SubcomplexMarker:
        idx = {}
        for n in range(self.complex.top + 1):
            a, b, _ = self.split(n)
            idx[n] = tuple(range(a, a + b))
        return SubcomplexMarker(idx)

    def source_inclusion(self) -> ChainMap:
        k = self.map.source
        return ChainMap(
            k,
            self.complex,
            {n: inclusion_matrix(k.group, self.complex.rank(n), range(self.split(n)[0], sum(self.split(n)[:2]))) for n in range(self.complex.top + 1)},
            self.complex.top,
        )

    def retraction(self) -> ChainMap:
        c = self.map.target
        g = c.group
        maps = {}
        for n in range(self.complex.top + 1):
            a, b, cc = self.split(n)
            maps[n] = block_matrix(
                g, [[GroupRingMatrix.identity(g, a), self.map[n], GroupRingMatrix.zero(g, a, cc)]]
            )
        return ChainMap(self.complex, c, maps, self.complex.top)

    def cone_projection(self, n: int) -> GroupRingMatrix:
        """``Cyl_n -> Cone(t)_n``, ``(a, b, c) -> (a, c)``."""
        a, b, c = self.split(n)
        m = GroupRingMatrix.zero(self.complex.group, a + c, a + b + c)
        for j in range(a):
            m.coeffs[j, j, 0] = 1
        for j in range(c):
            m.coeffs[a + j, a + b + j, 0] = 1
        return m


def algebraic_mapping_cylinder(t: ChainMap, top: Optional[int] = None) -> MappingCylinder:
    k, c = t.source, t.target
    g = c.group
    top = c.top if top is None else min(top, c.top)
    ranks = [c.rank(n) + k.rank(n) + k.rank(n - 1) for n in range(top + 1)]
    Z = GroupRingMatrix.zero
    diffs = {}
    for n in range(1, top + 1):
        a0, b0, c0 = c.rank(n - 1), k.rank(n - 1), k.rank(n - 2)
        a1, b1, c1 = c.rank(n), k.rank(n), k.rank(n - 1)
        diffs[n] = block_matrix(
            g,
            [
                [c.d(n), Z(g, a0, b1), t[n - 1]],
                [Z(g, b0, a1), k.d(n), -GroupRingMatrix.identity(g, c1)],
                [Z(g, c0, a1), Z(g, c0, b1), -k.d(n - 1)],
            ],
        )
    aug = None
    if c.aug is not None and k.aug is not None:
        aug = list(c.aug) + list(k.aug)
    cyl = ChainComplex(g, ranks, diffs, aug, name=f"Cyl({k.name}->{c.name})")
    return MappingCylinder(cyl, t)


# ---------------------------------------------------------------------------
# Presentation complexes


Word = Sequence[int]


def parse_word(word, gens: Sequence[str]) -> list[int]:
    """Letters ``x`` or ``x^-1``/``X`` (upper case is inverse) to signed indices.

    Index ``k`` (1-based) stands for generator ``k - 1``; ``-k`` for its inverse.
    Integer sequences pass through unchanged.
    """
    if not isinstance(word, str):
        return [int(x) for x in word]
    out = []
    i = 0
    while i < len(word):
        ch = word[i]
        i += 1
        if ch.isspace() or ch == "*":
            continue
        if ch.lower() not in gens:
            raise ChainError(f"unknown generator {ch!r}")
        idx = gens.index(ch.lower()) + 1
        sign = -1 if ch.isupper() else 1
        exp = 1
        if word.startswith("^", i):
            j = i + 1
            while j < len(word) and (word[j].isdigit() or word[j] == "-"):
                j += 1
            exp = int(word[i + 1 : j])
            i = j
        if exp < 0:
            sign, exp = -sign, -exp
        out.extend([sign * idx] * exp)
    return out


def presentation_complex(
    group: FiniteGroup,
    gen_images: Sequence[int],
    relators: Sequence[Word],
    name: str = "",
    gen_names: Sequence[str] = "xyzwuv",
) -> ChainComplex:
    """Cellular chains of the universal cover of a presentation 2-complex.

    ``d1`` sends generator cell ``j`` to ``g_j - 1`` and ``d2`` is the Fox
    Jacobian evaluated in ``group``.
    """
    n = group.order
    ngen = len(gen_images)
    inv = group.inverse
    words = [parse_word(w, list(gen_names)) for w in relators]
    for w in words:
        if any(x == 0 or abs(x) > ngen for x in w):
            raise ChainError("relator letter out of range")
        val = 0
        for x in w:
            g = gen_images[abs(x) - 1]
            val = group.mul[val][g if x > 0 else inv[g]]
        if val != 0:
            raise ChainError(f"relator {w} is not trivial in the group")
    d1 = GroupRingMatrix.zero(group, 1, ngen)
    for j, g in enumerate(gen_images):
        d1.coeffs[0, j, g] += 1
        d1.coeffs[0, j, 0] -= 1
    d2 = GroupRingMatrix.zero(group, ngen, len(words))
    for r, w in enumerate(words):
        prefix = 0
        for x in w:
            j = abs(x) - 1
            g = gen_images[j]
            if x > 0:
                d2.coeffs[j, r, prefix] += 1
                prefix = group.mul[prefix][g]
            else:
                prefix = group.mul[prefix][inv[g]]
                d2.coeffs[j, r, prefix] -= 1
    ranks = [1, ngen, len(words)] if words else ([1, ngen] if ngen else [1])
    diffs = {1: d1} if ngen else {}
    if words:
        diffs[2] = d2
    return ChainComplex(group, ranks, diffs, [1], name=name)


def with_cells(k: ChainComplex, degree: int, columns: GroupRingMatrix, name: Optional[str] = None) -> ChainComplex:
    """Attach free cells in ``degree`` whose boundaries are ``columns``."""
    if columns.rows != k.rank(degree - 1):
        raise ChainError("attaching map has the wrong number of rows")
    ranks = list(k.ranks) + [0] * max(0, degree - k.top)
    old = ranks[degree]
    ranks[degree] = old + columns.cols
    diffs = {i: k.d(i) for i in range(1, k.top + 1)}
    diffs[degree] = block_matrix(k.group, [[k.d(degree), columns]])
    if degree + 1 <= len(ranks) - 1:
        above = k.d(degree + 1)
        diffs[degree + 1] = block_matrix(
            k.group, [[above], [GroupRingMatrix.zero(k.group, columns.cols, above.cols)]]
        )
    return ChainComplex(k.group, ranks, diffs, k.aug, name or k.name, k.sub)


# ---------------------------------------------------------------------------
# Restriction of scalars


def restricted_complex(k: ChainComplex, iso) -> ChainComplex:
    """``k`` read over ``iso.source``; underlying abelian groups are unchanged."""
    diffs = {i: k.d(i).transported(iso) for i in range(1, k.top + 1)}
    return ChainComplex(iso.source, k.ranks, diffs, k.aug, k.name, k.sub)


def restricted_map(f: ChainMap, iso, source: ChainComplex, target: ChainComplex) -> ChainMap:
    return ChainMap(source, target, {i: m.transported(iso) for i, m in f.maps.items()}, f.bound)

"""Resolutions of Z, augmentation-preserving lifts and relative homotopies.

Every construction here is a degree-by-degree solve against an acyclic
target; results are checked before they are returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np

from . import exactlinalg as el
from .chain import (
    ChainComplex,
    ChainHomotopy,
    ChainMap,
    SubcomplexMarker,
    subcomplex,
)
from .exactlinalg import as_matrix, matmul
from .groupring import FiniteGroup, GroupRingMatrix, act_on_vectors, cyclic_group, solve_equivariant


class LiftError(ValueError):
    """A lift that should exist under the stated hypotheses does not."""


# ---------------------------------------------------------------------------
# Resolutions


def _orbit_columns(group: FiniteGroup, v: np.ndarray, rank: int) -> np.ndarray:
    return np.concatenate([act_on_vectors(group, g, v, rank) for g in range(group.order)], axis=1)


def module_generators(group: FiniteGroup, lattice: np.ndarray, rank: int) -> np.ndarray:
    """Columns of ``lattice`` whose G-orbits span the same Z-lattice.

    ``lattice`` must be G-stable.  Greedy: a basis vector is kept only if it
    is not already in the span of the orbits kept so far.
    """
    dim = lattice.shape[0]
    order = sorted(range(lattice.shape[1]), key=lambda j: (sum(abs(x) for x in lattice[:, j]), j))
    chosen = []
    span = el.zeros(dim, 0)
    for j in order:
        v = lattice[:, j : j + 1]
        if span.shape[1] and el.solve_integer_system(span, v) is not None:
            continue
        chosen.append(j)
        span = np.concatenate([span, _orbit_columns(group, v, rank)], axis=1)
        span = el.image_basis(span)
    return as_matrix(lattice[:, chosen], (dim, len(chosen)))


def build_resolution(group: FiniteGroup, top: int = 4, name: str = "") -> ChainComplex:
    """Free resolution of Z exact through degree ``top``.

    The returned complex stops at degree ``top + 1`` because exactness at
    ``top`` needs the next differential.  Each differential maps a free
    module onto a saturated kernel, using the kernel's Z-basis as a pool of
    module generators.
    """
    if top < 1:
        raise ValueError("resolution top must be at least 1")
    n = group.order
    ranks = [1]
    diffs = {}
    prev = el.as_matrix([[1] * n], (1, n))  # augmentation on Z[G]
    for i in range(1, top + 2):
        ker = el.kernel_basis(prev)
        gens = module_generators(group, ker, ranks[-1])
        d = GroupRingMatrix.from_columns(group, gens, ranks[-1])
        ranks.append(d.cols)
        diffs[i] = d
        prev = d.flatten()
        if d.cols == 0:
            break
    while len(ranks) < top + 2:
        ranks.append(0)
    return ChainComplex(group, ranks, diffs, [1], name=name or f"C({group.name or group.order})")


@lru_cache(maxsize=32)
def cached_resolution(group: FiniteGroup, top: int = 4) -> ChainComplex:
    return build_resolution(group, top)


def periodic_cyclic_resolution(n: int, top: int = 4, group: Optional[FiniteGroup] = None) -> ChainComplex:
    """The rank-one periodic resolution of Z over ``Z[C_n]``.

    Odd differentials are ``t - 1`` and even ones the norm element, where
    ``t`` is group element 1.
    """
    group = group or cyclic_group(n)
    t_minus_1 = [0] * n
    t_minus_1[0] -= 1
    t_minus_1[1 % n] += 1
    norm = [1] * n
    diffs = {}
    for i in range(1, top + 2):
        diffs[i] = GroupRingMatrix.from_entries(group, [[t_minus_1 if i % 2 else norm]])
    return ChainComplex(group, [1] * (top + 2), diffs, [1], name=f"P(C{n})")


def exactness_defects(c: ChainComplex, top: int) -> list[int]:
    """Degrees ``<= top`` where ``c`` fails to be exact (degree 0 uses the
    augmentation), checked by Smith normal form ranks and unit factors."""
    bad = []
    n = c.group.order
    for i in range(top + 1):
        lower = c.aug_row() if i == 0 else c.d(i).flatten()
        upper = c.d(i + 1).flatten()
        dim = c.rank(i) * n
        r_low = el.smith_normal_form(lower).rank if lower.size else 0
        snf = el.smith_normal_form(upper) if upper.size else None
        r_up = snf.rank if snf else 0
        saturated = snf is None or all(x == 1 for x in snf.diagonal if x)
        if r_low + r_up != dim or not saturated:
            bad.append(i)
    if c.aug is None or math.gcd(*c.aug, 0) != 1:
        bad.append(-1)
    return bad


def is_resolution(c: ChainComplex, top: int) -> bool:
    return not exactness_defects(c, top)


# ---------------------------------------------------------------------------
# Lifts


def _check_aug(k: ChainComplex, label: str):
    if k.aug is None:
        raise LiftError(f"{label} has no augmentation")
    if math.gcd(*k.aug, 0) != 1:
        raise LiftError(f"augmentation of {label} is not surjective")


def lift_augmented_map(
    k: ChainComplex,
    target: ChainComplex,
    qbound: int,
    rng: Optional[np.random.Generator] = None,
    start: Optional[Mapping[int, GroupRingMatrix]] = None,
) -> ChainMap:
    """Augmentation-preserving chain map ``k -> target`` on degrees ``0..qbound``.

    Needs ``target`` acyclic below ``qbound``.  ``start`` may fix some
    initial degrees.  With ``rng`` each degree adds random kernel elements,
    which gives an independent lift.
    """
    _check_aug(k, "source")
    _check_aug(target, "target")
    g = k.group
    if target.group != g:
        raise LiftError("source and target are over different groups")
    start = dict(start or {})
    maps: dict[int, GroupRingMatrix] = {}
    if 0 in start:
        f0 = start[0]
    else:
        row = target.aug_row()
        rhs = as_matrix([list(k.aug)], (1, k.rank(0)))
        x = el.solve_integer_system(row, rhs)
        if x is None:
            raise LiftError("augmentation cannot be lifted")
        if rng is not None and row.shape[1]:
            ker = el.kernel_basis(row)
            coef = rng.integers(-2, 3, size=(ker.shape[1], k.rank(0)))
            x = x + matmul(ker, as_matrix(coef.tolist(), coef.shape))
        f0 = GroupRingMatrix.from_columns(g, x, target.rank(0))
    maps[0] = f0
    for i in range(1, qbound + 1):
        if i in start:
            maps[i] = start[i]
            continue
        rhs = maps[i - 1] @ k.d(i)
        x = solve_equivariant(target.d(i), rhs, rng)
        if x is None:
            raise LiftError(f"no lift in degree {i}: target is not acyclic there")
        maps[i] = x
    f = ChainMap(k, target, maps, qbound)
    bad = f.chain_law_failures(1, qbound)
    if bad or not f.preserves_augmentation():
        raise LiftError(f"lift failed verification in degrees {bad}")
    return f


def relative_homotopy(
    alpha: ChainMap,
    beta: ChainMap,
    qbound: int,
    marker: Optional[SubcomplexMarker] = None,
    psi: Optional[Mapping[int, GroupRingMatrix]] = None,
    rng: Optional[np.random.Generator] = None,
) -> ChainHomotopy:
    """``D`` with ``alpha - beta = d D + D d`` on degrees ``0..qbound``.

    On the basis columns listed by ``marker`` the homotopy is forced to be
    ``psi`` (``psi[i]`` has one column per marked index in degree ``i``);
    the other columns are solved for.
    """
    src, tgt = alpha.source, alpha.target
    g = src.group
    marker = marker or SubcomplexMarker.empty()
    psi = dict(psi or {})
    maps: dict[int, GroupRingMatrix] = {}
    for i in range(qbound + 1):
        e = alpha[i] - beta[i]
        if i > 0:
            e = e - maps[i - 1] @ src.d(i)
        marked = marker.get(i)
        free = marker.complement(src, i)
        d_i = GroupRingMatrix.zero(g, tgt.rank(i + 1), src.rank(i))
        if marked:
            given = psi.get(i)
            if given is None:
                given = GroupRingMatrix.zero(g, tgt.rank(i + 1), len(marked))
            if given.shape != (tgt.rank(i + 1), len(marked)):
                raise LiftError(f"prescribed homotopy in degree {i} has the wrong shape")
            d_i.coeffs[:, list(marked), :] = given.coeffs
        if free:
            x = solve_equivariant(tgt.d(i + 1), e.take_columns(free), rng)
            if x is None:
                raise LiftError(f"no homotopy in degree {i}")
            d_i.coeffs[:, list(free), :] = x.coeffs
        maps[i] = d_i
    h = ChainHomotopy(src, tgt, maps)
    bad = h.failures(alpha, beta, range(qbound + 1))
    if bad:
        raise LiftError(f"homotopy fails in degrees {bad}")
    return h


# ---------------------------------------------------------------------------
# The (alpha, phi) pair


@dataclass
class AlphaPhi:
    """``alpha : C -> K`` on ``[0, 2]`` and ``phi : L_2 -> Z_2(K)`` with
    ``alpha t i_L - i_L - phi = d D + D d`` through degree 2 (``D_2 = 0``)."""

    alpha: ChainMap
    phi: GroupRingMatrix
    homotopy: ChainHomotopy  # L -> K, degrees 0 and 1
    sub: ChainComplex
    inclusion: ChainMap
    t: ChainMap


def restrict_map(t: ChainMap, inclusion: ChainMap) -> ChainMap:
    """``t o inclusion`` on the degrees where both are defined."""
    return t.compose(inclusion)


def alpha_phi(
    k: ChainComplex,
    marker: SubcomplexMarker,
    t: ChainMap,
    alpha: Optional[ChainMap] = None,
    rng: Optional[np.random.Generator] = None,
) -> AlphaPhi:
    """Build ``alpha`` (unless given), the homotopy on ``L`` and ``phi``."""
    c = t.target
    if alpha is None:
        alpha = lift_augmented_map(c, k, 2, rng)
    elif alpha.bound < 2 or alpha.chain_law_failures(1, 2) or not alpha.preserves_augmentation():
        raise LiftError("given alpha is not an augmentation-preserving chain map on [0, 2]")
    sub, incl = subcomplex(k, marker)
    t_l = restrict_map(t, incl)
    # alpha t i_L and i_L as maps L -> K
    at = alpha.truncated(2).compose(t_l)
    d = relative_homotopy(at, incl.truncated(2), 1, rng=rng)
    phi = at[2] - incl[2] - d[1] @ sub.d(2)
    if not (k.d(2) @ phi).is_zero():
        raise LiftError("phi does not land in the cycles")
    return AlphaPhi(alpha, phi, d, sub, incl, t)

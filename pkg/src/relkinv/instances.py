"""Random small complexes, subcomplexes and module maps for property checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chain import ChainComplex, SubcomplexMarker, parse_word, presentation_complex, with_cells
from .exactlinalg import as_matrix, matmul, zeros
from .groupring import (
    FiniteGroup,
    GroupRingMatrix,
    cyclic_group,
    klein_four_group,
    symmetric_group,
    trivial_group,
)
from .modules import PiModule, PiModuleHom, character_module, hom_basis, homology, trivial_module


@dataclass(frozen=True)
class Presentation:
    label: str
    group: FiniteGroup
    images: tuple[int, ...]
    relators: tuple[str, ...]


def presentations() -> list[Presentation]:
    c2, c3, c4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
    return [
        Presentation("C1", trivial_group(), (0,), ("x",)),
        Presentation("C2", c2, (1,), ("x^2",)),
        Presentation("C2b", c2, (1, 0), ("x^2", "y")),
        Presentation("C3", c3, (1,), ("x^3",)),
        Presentation("C3b", c3, (1, 2), ("x^3", "yX^2")),
        Presentation("C4", c4, (1,), ("x^4",)),
        Presentation("C4b", c4, (1, 3), ("x^4", "xy")),
        Presentation("V4", klein_four_group(), (1, 2), ("xx", "yy", "xyXY")),
        Presentation("S3", symmetric_group(3), (1, 3), ("xx", "y^3", "xyxy")),
    ]


def _word_text(word: Sequence[int]) -> str:
    letters = "xyzwuv"
    return "".join(letters[abs(x) - 1] if x > 0 else letters[abs(x) - 1].upper() for x in word)


def consequence(rng: np.random.Generator, relator: str, ngen: int) -> str:
    """A relator that holds whenever ``relator`` does."""
    w = parse_word(relator, list("xyzwuv"))
    kind = int(rng.integers(3))
    if kind == 0:
        return _word_text(w + w)
    if kind == 1:
        return _word_text([-x for x in reversed(w)])
    g = int(rng.integers(1, ngen + 1)) * (1 if rng.integers(2) else -1)
    return _word_text([g] + w + [-g])


def cycle_columns(rng: np.random.Generator, k: ChainComplex, degree: int, count: int, spread: int = 1) -> GroupRingMatrix:
    """Random equivariant maps of ``count`` free cells onto cycles."""
    z = homology(k, degree).cycles
    cols = []
    for _ in range(count):
        coef = rng.integers(-spread, spread + 1, size=(z.shape[1], 1))
        cols.append(matmul(z, as_matrix(coef.tolist(), coef.shape)))
    colform = np.concatenate(cols, axis=1) if cols else as_matrix([], (k.rank(degree) * k.group.order, 0))
    return GroupRingMatrix.from_columns(k.group, colform, k.rank(degree))


def random_complex(
    rng: np.random.Generator,
    labels: Optional[Sequence[str]] = None,
    max_rank: int = 2,
    extra_relators: int = 1,
    three_cells: int = 1,
) -> ChainComplex:
    """A presentation complex, possibly with redundant relators and 3-cells.

    All outputs are acyclic below 2.  ``max_rank`` bounds every rank.
    """
    pool = [p for p in presentations() if labels is None or p.label in labels]
    pool = [p for p in pool if len(p.images) <= max_rank and len(p.relators) <= max_rank]
    if not pool:
        raise ValueError("no presentation satisfies the rank bound")
    p = pool[int(rng.integers(len(pool)))]
    rels = list(p.relators)
    for _ in range(int(rng.integers(extra_relators + 1))):
        if len(rels) >= max_rank:
            break
        rels.append(consequence(rng, rels[int(rng.integers(len(rels)))], len(p.images)))
    k = presentation_complex(p.group, list(p.images), rels, name=f"{p.label}{len(rels)}")
    n3 = int(rng.integers(min(three_cells, max_rank) + 1))
    if n3:
        k = with_cells(k, 3, cycle_columns(rng, k, 2, n3), name=f"{k.name}+{n3}")
    return k


def random_marker(
    rng: np.random.Generator,
    k: ChainComplex,
    p: float = 0.5,
    full_low: bool = False,
    inside: Optional[SubcomplexMarker] = None,
) -> SubcomplexMarker:
    """A random d-closed set of basis elements (optionally inside another)."""
    chosen: dict[int, set[int]] = {}
    for i in range(k.top, -1, -1):
        pool = list(inside.get(i)) if inside is not None else list(range(k.rank(i)))
        if full_low and i <= 1:
            picked = set(pool)
        else:
            picked = {j for j in pool if rng.random() < p}
        picked |= chosen.get(i, set())
        chosen[i] = picked
        if i > 0:
            d = k.d(i)
            below = chosen.setdefault(i - 1, set())
            for j in picked:
                below.update(r for r in range(d.rows) if any(d.coeffs[r, j]))
    return SubcomplexMarker.of({i: sorted(v) for i, v in chosen.items()})


def random_hom(rng: np.random.Generator, source: PiModule, target: PiModule, spread: int = 2) -> PiModuleHom:
    basis = hom_basis(source, target)
    m = zeros(target.gens, source.gens)
    for b in basis:
        m = m + b * int(rng.integers(-spread, spread + 1))
    return PiModuleHom(source, target, target.reduce(m) if target.gens else m)


def coefficient_modules(group: FiniteGroup) -> list[PiModule]:
    """Small coefficient modules for cohomology checks."""
    mods = [trivial_module(group), trivial_module(group, 2), trivial_module(group, 3)]
    n = group.order
    if n % 2 == 0 and group == cyclic_group(n):
        mods.append(character_module(group, [(-1) ** k for k in range(n)]))
    return mods

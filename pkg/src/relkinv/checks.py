"""Randomised suites for the identities the engine is built on.

Each suite returns a list of :class:`Trial` records; a failing trial keeps
enough data (complex JSON, marker, seed) to replay it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import catalog
from .chain import ChainComplex, ChainMap, SubcomplexMarker, inclusion_matrix, subcomplex, with_cells
from . import exactlinalg as el
from .exactlinalg import as_matrix, matmul, zeros
from .groupring import GroupIso, GroupRingMatrix, act_on_vectors, solve_equivariant
from .instances import coefficient_modules, cycle_columns, random_complex, random_hom, random_marker
from .io import complex_to_json
from .kinvariant import (
    ExtensionDatum,
    KInvariantError,
    classes_equal,
    cylinder_datum,
    decide_extension,
    find_homotopy,
    homotopy_system,
    k_invariant,
    phi_ev_delta_check,
    pullback_class,
    boundary_vanishing_check,
    restrict_scalars_class,
    verify_extension,
)
from .modules import homology, induced_map, is_acyclic_below, sign_module_cyclic, trivial_module


@dataclass
class Trial:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


def _describe(k: ChainComplex, marker: Optional[SubcomplexMarker] = None, **extra) -> dict:
    out = {"complex": complex_to_json(k)}
    if marker is not None:
        out["sub"] = marker.to_json()
    out.update(extra)
    return out


def bundled_pairs(require_acyclic: bool = True) -> list[tuple[str, ChainComplex, str, SubcomplexMarker]]:
    """Every bundled complex with its standard markers."""
    out = []
    for name in catalog.names():
        k = catalog.load(name)
        if require_acyclic and not is_acyclic_below(k, 2):
            continue
        for mname, m in catalog.standard_markers(k).items():
            out.append((name, k, mname, m))
    return out


# ---------------------------------------------------------------------------
# Individual suites


def check_well_defined(rng: np.random.Generator, instances: int = 10, reruns: int = 20, max_order: int = 4) -> list[Trial]:
    """Randomised ``(alpha, phi)`` choices give one class."""
    labels = ["C1", "C2", "C2b", "C3", "C3b", "C4", "C4b"]
    out = []
    for _ in range(instances):
        k = random_complex(rng, labels, max_rank=2)
        assert k.group.order <= max_order
        marker = random_marker(rng, k)
        base = k_invariant(k, marker)
        classes = [base.cls] + [k_invariant(k, marker, base.t, rng=rng, h2=base.h2).cls for _ in range(reruns - 1)]
        ok = all(classes_equal(a, b) for a, b in itertools.combinations(classes, 2))
        out.append(Trial("well-defined", ok, _describe(k, marker, reruns=reruns)))
    return out


def nested_pullback_holds(k: ChainComplex, small: SubcomplexMarker, big: SubcomplexMarker) -> bool:
    """``incl^* k_{K,L'} = k_{K,L}`` for ``L`` inside ``L'``."""
    kb = k_invariant(k, big)
    ks = k_invariant(k, small, kb.t)
    sub, _ = subcomplex(k, small)
    sub_big, _ = subcomplex(k, big)
    maps = {}
    for i in range(sub.top + 1):
        pos = {j: p for p, j in enumerate(big.get(i))}
        maps[i] = inclusion_matrix(k.group, sub_big.rank(i), [pos[j] for j in small.get(i)])
    h = ChainMap(sub, sub_big, maps, sub.top)
    return classes_equal(pullback_class(kb.cls, ks.cls.cone, h), ks.cls)


def check_nested_pullback(rng: np.random.Generator, instances: int = 10, bundled: bool = True) -> list[Trial]:
    out = []
    if bundled:
        for name, k, mname, m in bundled_pairs():
            full = SubcomplexMarker.full(k)
            out.append(Trial("nested-pullback", nested_pullback_holds(k, m, full), {"example": name, "sub": mname}))
    for _ in range(instances):
        k = random_complex(rng, max_rank=3)
        big = random_marker(rng, k, 0.7)
        small = random_marker(rng, k, 0.5, inside=big)
        out.append(Trial("nested-pullback", nested_pullback_holds(k, small, big), _describe(k, small, big=big.to_json())))
    return out


def check_boundary_vanishing(rng: np.random.Generator, instances: int = 10, bundled: bool = True) -> list[Trial]:
    out = []
    if bundled:
        k = catalog.load("rp2")
        out.append(Trial("boundary-vanishing", boundary_vanishing_check(k, SubcomplexMarker.skeleton(k, 1)), {"example": "rp2"}))
    for _ in range(instances):
        k = random_complex(rng, max_rank=3)
        y = random_marker(rng, k, 0.4, full_low=True)
        out.append(Trial("boundary-vanishing", boundary_vanishing_check(k, y), _describe(k, y)))
    return out


def check_phi_ev_delta(rng: np.random.Generator, instances: int = 5, bundled: bool = True) -> list[Trial]:
    out = []
    if bundled:
        rp2 = catalog.load("rp2")
        rep = phi_ev_delta_check(rp2, sign_module_cyclic(rp2.group))
        out.append(Trial("phi-ev-delta", rep.ok and rep.generators > 0, {"example": "rp2", "generators": rep.generators}))
        c3 = catalog.load("c3pres")
        rep = phi_ev_delta_check(c3, trivial_module(c3.group))
        out.append(Trial("phi-ev-delta", rep.ok and rep.generators > 0, {"example": "c3pres", "generators": rep.generators}))
    for _ in range(instances):
        k = random_complex(rng, max_rank=3)
        mods = coefficient_modules(k.group)
        a = mods[int(rng.integers(len(mods)))]
        rep = phi_ev_delta_check(k, a)
        out.append(Trial("phi-ev-delta", rep.ok, _describe(k, module=a.to_json(), generators=rep.generators)))
    return out


def check_vanishing_criterion(rng: np.random.Generator, instances: int = 0, bundled: bool = True) -> list[Trial]:
    """``k_{X,Y} = 0`` exactly when the cylinder datum extends."""
    cases = []
    if bundled:
        cases += [(k, m, {"example": name, "sub": mname}) for name, k, mname, m in bundled_pairs()]
    for _ in range(instances):
        k = random_complex(rng, max_rank=2)
        m = random_marker(rng, k)
        cases.append((k, m, _describe(k, m)))
    out = []
    for k, m, info in cases:
        kk = k_invariant(k, m)
        zero = kk.cls.is_zero()
        datum = cylinder_datum(k, m, kk.t)
        res = decide_extension(datum)
        ok = res.extends == zero
        if res.extends:
            ok = ok and bool(verify_extension(res.f, datum, res.homotopy))
        out.append(Trial("vanishing-criterion", ok, {**info, "zero": zero, "extends": res.extends}))
    return out


def check_restriction(rng: np.random.Generator, instances: int = 5) -> list[Trial]:
    """Restriction along an automorphism and back is the identity."""
    out = []
    for _ in range(instances):
        k = random_complex(rng, ["C3", "C3b", "C4", "C4b", "V4", "S3"], max_rank=3)
        g = k.group
        autos = automorphisms(g)
        u = autos[int(rng.integers(len(autos)))]
        c = k_invariant(k, random_marker(rng, k)).cls
        back = restrict_scalars_class(u.inverse(), restrict_scalars_class(u, c))
        ok = (
            back.cone.complex.same_as(c.cone.complex)
            and back.module.same_as(c.module)
            and bool((back.values == c.values).all())
        )
        out.append(Trial("restriction", ok, _describe(k, iso=list(u.mapping))))
    return out


def automorphisms(g) -> list[GroupIso]:
    out = []
    for perm in itertools.permutations(range(1, g.order)):
        mapping = (0,) + perm
        try:
            out.append(GroupIso(g, g, mapping))
        except ValueError:
            pass
    return out


# ---------------------------------------------------------------------------
# Extension round trip


@dataclass
class SearchResult:
    found: Optional[ChainMap]
    examined: int


def _box(dim: int, box: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if dim > 8:
        raise ValueError(f"brute-force box of dimension {dim} is too large")
    return np.array(list(itertools.product(range(-box, box + 1), repeat=dim)), dtype=np.int64)


def _int64(m) -> np.ndarray:
    m = np.asarray(m)
    if m.size and el.max_abs(m) > 2**40:
        raise OverflowError("signature matrix too large for the vectorised search")
    return np.array(m.tolist(), dtype=np.int64).reshape(m.shape)


def _index_by_image(vectors: np.ndarray, mat: np.ndarray) -> dict:
    images = vectors @ _int64(mat).T
    out: dict = {}
    for idx, img in enumerate(map(tuple, images.tolist())):
        out.setdefault(img, []).append(idx)
    return out


class _Signature:
    """Linear conditions on the columns of ``f_2``, each read modulo its
    own modulus (0 means exact).  ``blocks[k]`` maps column ``k`` to the
    signature space."""

    def __init__(self, ncols: int, dim: int):
        self.blocks = [np.zeros((0, dim), dtype=np.int64) for _ in range(ncols)]
        self.moduli = np.zeros(0, dtype=np.int64)
        self.keep = np.zeros(0, dtype=bool)

    def add(self, per_column: list, moduli):
        moduli = np.asarray(list(moduli), dtype=np.int64)
        keep = moduli != 1
        for k, m in enumerate(per_column):
            self.blocks[k] = np.concatenate([self.blocks[k], _int64(m)[keep]], axis=0)
        self.moduli = np.concatenate([self.moduli, moduli[keep]])
        self.keep = np.concatenate([self.keep, keep])

    def reduce(self, x: np.ndarray) -> np.ndarray:
        mods = self.moduli
        nz = mods != 0
        if nz.any():
            x = x.copy()
            x[..., nz] = np.mod(x[..., nz], mods[nz])
        return x


def _act_matrices(group, rank: int) -> list[np.ndarray]:
    eye = el.identity(rank * group.order)
    return [act_on_vectors(group, g, eye, rank) for g in range(group.order)]


def search_extensions(datum: ExtensionDatum, box: int = 2, limit: int = 2_000_000) -> SearchResult:
    """Exhaustive search for ``f`` with ``f_0, f_1, f_2`` entries in
    ``[-box, box]`` meeting every extension condition; ``f_3`` may be any
    integer solution.

    For fixed ``f_0, f_1`` the remaining conditions (``f_* = F``,
    ``f_2 d_3`` a boundary, the degree-2 homotopy equation) are linear in
    the columns of ``f_2`` modulo fixed lattices, so the last column is
    matched by a hash lookup instead of a loop.  Any hit is rebuilt and
    re-checked with the independent verifier.
    """
    k, k2 = datum.k, datum.k2
    g = k.group
    n = g.order
    sub, incl = subcomplex(k, datum.marker)
    sub2, incl2 = subcomplex(k2, datum.marker2)
    ih = incl2.compose(datum.h)
    h2, h2b = homology(k, 2), homology(k2, 2)
    dim2 = k2.rank(2) * n
    ncols = k.rank(2)
    acts = _act_matrices(g, k2.rank(2))

    def combine(weights: np.ndarray) -> np.ndarray:
        """``v -> sum_g weights[g] * (g . v)`` as a matrix."""
        out = zeros(dim2, dim2)
        for gg, w in enumerate(weights):
            if w:
                out = out + acts[gg] * int(w)
        return out

    sig = _Signature(ncols, dim2)
    # f_* = F: rows (a, b) = coordinate b of the image of generator a
    lift = h2.lift_matrix
    blocks = [[] for _ in range(ncols)]
    mods = []
    for a_ in range(h2.module.gens):
        for kk in range(ncols):
            blocks[kk].append(matmul(h2b.proj, combine(lift[kk * n : (kk + 1) * n, a_])))
        mods += list(h2b.module.moduli)
    if mods:
        sig.add([np.concatenate(b, axis=0) for b in blocks], mods)
    target_f = [int(datum.f.matrix[b_, a_]) for a_ in range(h2.module.gens) for b_ in range(h2b.module.gens)]
    # f_2 d_3 lies in B_2(K')
    d3 = k.d(3).column_form()
    if k.rank(3):
        cok = el.cokernel_presentation(k2.d(3).flatten()) if k2.rank(3) else el.Cokernel(tuple([0] * dim2), el.identity(dim2))
        blocks = [[] for _ in range(ncols)]
        for j in range(k.rank(3)):
            for kk in range(ncols):
                blocks[kk].append(matmul(cok.projection, combine(d3[kk * n : (kk + 1) * n, j])))
        sig.add([np.concatenate(b, axis=0) for b in blocks], list(cok.factors) * k.rank(3))
    nb = len(sig.keep)
    # degree-2 homotopy equation modulo the lattice of allowed corrections
    system = homotopy_system(sub, k2, 2)
    eo, uo = system.equation_offsets, system.unknown_offsets
    a01 = system.matrix[: eo[2], : uo[2]]
    ker01 = el.kernel_basis(a01) if a01.size else el.identity(uo[2])
    a2_d1 = system.matrix[eo[2] : eo[3], uo[1] : uo[2]]
    a2_d2 = system.matrix[eo[2] : eo[3], uo[2] : uo[3]]
    lam = np.concatenate([matmul(a2_d1, ker01[uo[1] : uo[2], :]), a2_d2], axis=1)
    lcols = list(datum.marker.get(2))
    hom_cok = None
    if lcols:
        hom_cok = el.cokernel_presentation(lam) if lam.shape[1] else el.Cokernel(tuple([0] * lam.shape[0]), el.identity(lam.shape[0]))
        per = []
        for kk in range(ncols):
            m = zeros(lam.shape[0], dim2)
            if kk in lcols:
                p = lcols.index(kk)
                m[p * dim2 : (p + 1) * dim2, :] = el.identity(dim2)
            per.append(matmul(hom_cok.projection, m))
        sig.add(per, hom_cok.factors)

    boxes = {}

    def candidates(i: int, rhs_cols: np.ndarray) -> list[np.ndarray]:
        if i not in boxes:
            vecs = _box(k2.rank(i) * n, box)
            mat = k2.aug_row() if i == 0 else k2.d(i).flatten()
            boxes[i] = (vecs, _index_by_image(vecs, mat))
        vecs, index = boxes[i]
        return [vecs[index.get(tuple(int(x) for x in rhs_cols[:, j]), [])] for j in range(rhs_cols.shape[1])]

    def assemble(cols, rows: int) -> GroupRingMatrix:
        if not len(cols):
            return GroupRingMatrix.zero(g, rows, 0)
        colform = as_matrix(np.stack(cols, axis=1).tolist(), (rows * n, len(cols)))
        return GroupRingMatrix.from_columns(g, colform, rows)

    def matches(cands, target) -> list[tuple]:
        """Index tuples whose summed signatures equal ``target``."""
        nonlocal examined, work
        if ncols == 0:
            return [()] if not target.any() else []
        sigs = [sig.reduce(c @ sig.blocks[kk].T) for kk, c in enumerate(cands)]
        last = {}
        for idx, row in enumerate(sigs[-1].tolist()):
            last.setdefault(tuple(row), []).append(idx)
        if ncols == 1:
            examined += len(cands[0])
            return [(i,) for i in last.get(tuple(target.tolist()), [])]
        for combo in itertools.product(*[range(len(c)) for c in cands[:-2]]):
            acc = target.copy()
            for kk, idx in enumerate(combo):
                acc = acc - sigs[kk][idx]
            needs = sig.reduce(acc[None, :] - sigs[-2]).tolist()
            work += len(needs)
            examined += len(needs) * len(cands[-1])
            if work > limit:
                raise RuntimeError("brute-force search exceeded its limit")
            for j, need in enumerate(needs):
                hit = last.get(tuple(need))
                if hit:
                    return [combo + (j, hit[0])]
        return []

    examined = work = 0
    aug_rhs = as_matrix([list(k.aug)], (1, k.rank(0)))
    for c0 in itertools.product(*candidates(0, aug_rhs)):
        f0 = assemble(list(c0), k2.rank(0))
        for c1 in itertools.product(*candidates(1, (f0 @ k.d(1)).column_form())):
            f1 = assemble(list(c1), k2.rank(1))
            partial = ChainMap(k, k2, {0: f0, 1: f1, 2: GroupRingMatrix.zero(g, k2.rank(2), k.rank(2))}, 2)
            b = system.rhs(partial.compose(incl), ih)
            x01 = el.solve_integer_system(a01, b[: eo[2]]) if a01.size else zeros(uo[2], 1)
            if x01 is None:
                continue
            target = list(target_f) + [0] * (nb - len(target_f))
            if hom_cok is not None:
                # need vec(f_2 i_2) = b_2 + A_2 x_{D_1} modulo lam, where b_2
                # currently holds -i'_2 h_2
                w = b[eo[2] : eo[3]] * -1 + matmul(a2_d1, x01[uo[1] : uo[2]])
                target += [int(x) for x in matmul(hom_cok.projection, w)[:, 0]]
            target = sig.reduce(np.array(target, dtype=np.int64)[sig.keep])
            cands = candidates(2, (f1 @ k.d(2)).column_form())
            if any(len(c) == 0 for c in cands):
                continue
            for combo in matches(cands, target):
                f2 = assemble([cands[kk][idx] for kk, idx in enumerate(combo)], k2.rank(2))
                f3 = solve_equivariant(k2.d(3), f2 @ k.d(3))
                f = ChainMap(k, k2, {0: f0, 1: f1, 2: f2, 3: f3}, 3) if f3 is not None else None
                if f is None or not verify_extension(f, datum, check_classes=False):
                    raise RuntimeError("signature match failed independent verification")
                return SearchResult(f, examined)
    return SearchResult(None, examined)


def random_extension_datum(rng: np.random.Generator) -> ExtensionDatum:
    """A small datum: ``K' = K`` or ``K`` with extra 3-cells, ``h = id``,
    random ``F``."""
    k = random_complex(rng, ["C1", "C2", "C2b", "C3"], max_rank=2, three_cells=1)
    if rng.random() < 0.3:
        k2 = with_cells(k, 3, cycle_columns(rng, k, 2, 1), name=f"{k.name}'")
    else:
        k2 = k
    marker = random_marker(rng, k, 0.5)
    hk, hk2 = homology(k, 2), homology(k2, 2)
    if rng.random() < 0.3:
        f = random_hom(rng, hk.module, hk2.module, spread=0)
    else:
        f = random_hom(rng, hk.module, hk2.module)
    return ExtensionDatum.build(k, marker, k2, marker, f=f.matrix)


def check_round_trip(rng: np.random.Generator, instances: int = 25, box: int = 2) -> list[Trial]:
    out = []
    for _ in range(instances):
        datum = random_extension_datum(rng)
        res = decide_extension(datum, rng=rng)
        info = _describe(datum.k, datum.marker, target=complex_to_json(datum.k2), F=datum.f.matrix.tolist())
        if res.extends:
            ok = bool(verify_extension(res.f, datum, res.homotopy))
            out.append(Trial("round-trip", ok, {**info, "extends": True}))
        else:
            search = search_extensions(datum, box)
            ok = search.found is None and not res.obstruction.is_zero()
            out.append(Trial("round-trip", ok, {**info, "extends": False, "examined": search.examined}))
    return out


SUITES: dict[str, Callable[..., list[Trial]]] = {
    "well-defined": lambda rng, trials: check_well_defined(rng, instances=trials),
    "nested-pullback": lambda rng, trials: check_nested_pullback(rng, trials),
    "boundary-vanishing": lambda rng, trials: check_boundary_vanishing(rng, trials),
    "phi-ev-delta": lambda rng, trials: check_phi_ev_delta(rng, trials),
    "round-trip": lambda rng, trials: check_round_trip(rng, trials),
    "vanishing-criterion": lambda rng, trials: check_vanishing_criterion(rng, trials),
    "restriction": lambda rng, trials: check_restriction(rng, trials),
}

"""Finitely generated abelian groups with a group action, homology, cochains.

A :class:`PiModule` is ``Z^g / span(relations)`` with one integer ``g x g``
matrix per group element acting on generator coordinates (column vectors).
Cochains ``Hom_{Z[G]}(P_n, M)`` on a free module of rank ``r`` are stored as
``g x r`` integer matrices: column ``j`` is the value on the basis element
``e_j``.  The coboundary is ``c -> c o d`` with no extra sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import exactlinalg as el
from .exactlinalg import as_matrix, matmul, zeros
from .groupring import FiniteGroup, GroupIso, GroupRingMatrix, act_on_vectors


class ModuleError(ValueError):
    pass


class PiModule:
    def __init__(
        self,
        group: FiniteGroup,
        gens: int,
        relations,
        action: Sequence,
        name: str = "",
    ):
        self.group = group
        self.gens = int(gens)
        rel = as_matrix(relations) if np.size(relations) else zeros(self.gens, 0)
        if rel.shape[0] != self.gens:
            raise ModuleError("relation matrix must have one row per generator")
        self.relations = rel
        if len(action) != group.order:
            raise ModuleError("need one action matrix per group element")
        self.action = tuple(
            as_matrix(a, (self.gens, self.gens)) if self.gens else zeros(0, 0) for a in action
        )
        self.name = name

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<PiModule{label} gens={self.gens} moduli={self.moduli}>"

    # -- relation lattice -----------------------------------------------------

    @cached_property
    def moduli(self) -> Optional[tuple[int, ...]]:
        """Per-generator modulus when every relation is a multiple of one
        generator (0 = free), else ``None``."""
        mods = [0] * self.gens
        for col in self.relations.T:
            nz = [i for i, x in enumerate(col) if x]
            if not nz:
                continue
            if len(nz) > 1:
                return None
            i = nz[0]
            mods[i] = int(np.gcd(mods[i], abs(int(col[i]))))
        return tuple(mods)

    def reduce(self, vecs) -> np.ndarray:
        vecs = as_matrix(vecs).copy()
        mods = self.moduli
        if mods is not None:
            for i, m in enumerate(mods):
                if m:
                    vecs[i, :] = [x % m for x in vecs[i, :]]
        return vecs

    def in_relations(self, vecs) -> bool:
        vecs = as_matrix(vecs)
        if vecs.size == 0:
            return True
        mods = self.moduli
        if mods is not None:
            for i, m in enumerate(mods):
                row = vecs[i, :]
                if m == 0:
                    if any(row):
                        return False
                elif any(x % m for x in row):
                    return False
            return True
        return el.solve_integer_system(self.relations, vecs) is not None

    def is_zero_module(self) -> bool:
        return self.simplified()[0].gens == 0

    def equal_elements(self, a, b) -> bool:
        return self.in_relations(as_matrix(a) - as_matrix(b))

    # -- action ---------------------------------------------------------------

    def rho(self, coeffs: Sequence[int]) -> np.ndarray:
        """Action matrix of a group ring element."""
        out = zeros(self.gens, self.gens)
        for g, a in enumerate(coeffs):
            if a:
                out = out + self.action[g] * int(a)
        return out

    def validation_failures(self) -> list[str]:
        out = []
        n = self.group.order
        if not self.in_relations(self.action[0] - el.identity(self.gens)):
            out.append("identity does not act trivially")
        for g in range(n):
            if not self.in_relations(matmul(self.action[g], self.relations)):
                out.append(f"action of {g} does not preserve the relations")
        for g in range(n):
            for h in range(n):
                lhs = matmul(self.action[g], self.action[h])
                if not self.in_relations(lhs - self.action[self.group.mul[g][h]]):
                    out.append(f"action law fails for ({g}, {h})")
        return out

    def validate(self) -> "PiModule":
        fails = self.validation_failures()
        if fails:
            raise ModuleError("; ".join(fails))
        return self

    # -- normal form ------------------------------------------------------------

    def simplified(self) -> tuple["PiModule", np.ndarray, np.ndarray]:
        """Equivalent module on Smith generators with unit factors dropped.

        Returns ``(module, proj, lift)``: ``proj`` maps old coordinates to
        new ones and ``lift`` maps new coordinates back.
        """
        cached = self.__dict__.get("_simplified")
        if cached is not None:
            return cached
        g = self.gens
        snf = el.smith_normal_form(self.relations)
        diag = snf.diagonal
        factors = [diag[i] if i < len(diag) else 0 for i in range(g)]
        keep = [i for i, d in enumerate(factors) if d != 1]
        uinv = el.solve_integer_system(snf.U, el.identity(g)) if g else zeros(0, 0)
        proj = snf.U[keep, :] if g else zeros(0, 0)
        lift = uinv[:, keep] if g else zeros(0, 0)
        proj = as_matrix(proj, (len(keep), g))
        lift = as_matrix(lift, (g, len(keep)))
        mods = [factors[i] for i in keep]
        rel = zeros(len(keep), sum(1 for m in mods if m))
        c = 0
        for i, m in enumerate(mods):
            if m:
                rel[i, c] = m
                c += 1
        action = []
        for a in self.action:
            na = matmul(matmul(proj, a), lift)
            for i, m in enumerate(mods):
                if m:
                    na[i, :] = [x % m for x in na[i, :]]
            action.append(na)
        out = PiModule(self.group, len(keep), rel, action, self.name)
        result = (out, proj, lift)
        self.__dict__["_simplified"] = result
        return result

    def invariants(self) -> tuple[int, ...]:
        """Invariant factors of the underlying abelian group (0 = Z)."""
        mods = self.simplified()[0].moduli
        return tuple(sorted(m for m in mods if m)) + tuple(0 for m in mods if m == 0)

    def restricted(self, iso: GroupIso) -> "PiModule":
        """``Res_u``: the source group acts through ``iso``."""
        if iso.target != self.group:
            raise ModuleError("isomorphism target must be the module's group")
        action = [self.action[iso(g)] for g in range(iso.source.order)]
        return PiModule(iso.source, self.gens, self.relations, action, self.name)

    def same_as(self, other: "PiModule") -> bool:
        return (
            self is other
            or (
                self.group == other.group
                and self.gens == other.gens
                and self.relations.shape == other.relations.shape
                and bool((self.relations == other.relations).all())
                and all((a == b).all() for a, b in zip(self.action, other.action))
            )
        )

    def to_json(self) -> dict:
        return {
            "gens": self.gens,
            "relations": self.relations.tolist(),
            "action": [a.tolist() for a in self.action],
        }


def trivial_module(group: FiniteGroup, modulus: int = 0) -> PiModule:
    rel = [[modulus]] if modulus else zeros(1, 0)
    name = "Z" if not modulus else f"Z/{modulus}"
    return PiModule(group, 1, rel, [[[1]]] * group.order, name)


def character_module(group: FiniteGroup, signs: Sequence[int], name: str = "Z^-") -> PiModule:
    """Rank one module where ``g`` acts by ``signs[g]`` (a hom to {+1,-1})."""
    return PiModule(group, 1, zeros(1, 0), [[[int(s)]] for s in signs], name).validate()


def sign_module_cyclic(group: FiniteGroup) -> PiModule:
    """``Z^-`` for a cyclic group of even order, generator acting by ``-1``."""
    n = group.order
    if n % 2:
        raise ModuleError("sign character needs even order")
    return character_module(group, [(-1) ** k for k in range(n)])


def regular_module(group: FiniteGroup) -> PiModule:
    n = group.order
    action = []
    for g in range(n):
        a = zeros(n, n)
        for h in range(n):
            a[group.mul[g][h], h] = 1
        action.append(a)
    return PiModule(group, n, zeros(n, 0), action, "Z[G]")


def module_from_json(group: FiniteGroup, data: dict) -> PiModule:
    kind = data.get("kind")
    if kind == "trivial":
        return trivial_module(group, int(data.get("modulus", 0)))
    if kind == "character":
        return character_module(group, data["signs"])
    if kind == "regular":
        return regular_module(group)
    return PiModule(group, data["gens"], data.get("relations", zeros(data["gens"], 0)), data["action"]).validate()


class PiModuleHom:
    """Module map on generator coordinates, equivariant along ``iso``.

    ``F(g x) = u(g) F(x)``; with no ``iso`` the groups must agree and ``u``
    is the identity.
    """

    def __init__(self, source: PiModule, target: PiModule, matrix, iso: Optional[GroupIso] = None, check: bool = True):
        self.source = source
        self.target = target
        self.matrix = as_matrix(matrix, (target.gens, source.gens)) if target.gens * source.gens else zeros(target.gens, source.gens)
        self.iso = iso
        if iso is None and source.group != target.group:
            raise ModuleError("modules over different groups need an isomorphism")
        if check:
            fails = self.failures()
            if fails:
                raise ModuleError("; ".join(fails))

    def failures(self) -> list[str]:
        out = []
        if not self.target.in_relations(matmul(self.matrix, self.source.relations)):
            out.append("relations are not mapped into relations")
        u = self.iso
        for g in range(self.source.group.order):
            ug = u(g) if u is not None else g
            lhs = matmul(self.matrix, self.source.action[g])
            rhs = matmul(self.target.action[ug], self.matrix)
            if not self.target.in_relations(lhs - rhs):
                out.append(f"not equivariant at group element {g}")
                break
        return out

    def apply(self, vecs) -> np.ndarray:
        return self.target.reduce(matmul(self.matrix, as_matrix(vecs)))

    @classmethod
    def identity(cls, m: PiModule) -> "PiModuleHom":
        return cls(m, m, el.identity(m.gens))

    @classmethod
    def zero(cls, source: PiModule, target: PiModule) -> "PiModuleHom":
        return cls(source, target, zeros(target.gens, source.gens))

    def scaled(self, k: int) -> "PiModuleHom":
        return PiModuleHom(self.source, self.target, self.matrix * k, self.iso)

    def compose(self, other: "PiModuleHom") -> "PiModuleHom":
        return PiModuleHom(other.source, self.target, matmul(self.matrix, other.matrix))


def hom_basis(source: PiModule, target: PiModule) -> list[np.ndarray]:
    """Integer matrices generating ``Hom_{Z[G]}(source, target)`` modulo
    maps into the relation lattice."""
    gs, gt = source.gens, target.gens
    if gs == 0 or gt == 0:
        return []
    n = source.group.order
    rt = target.relations
    # Unknowns: vec(F) (row-major, gt*gs) followed by relation multipliers.
    eqs = []
    nrel_blocks = []
    # F @ rel_s in span(rt)
    rs = source.relations
    for c in range(rs.shape[1]):
        rows = zeros(gt, gt * gs)
        for i in range(gt):
            for k in range(gs):
                rows[i, i * gs + k] = rs[k, c]
        eqs.append(rows)
    for g in range(n):
        a, b = source.action[g], target.action[g]
        for c in range(gs):
            rows = zeros(gt, gt * gs)
            for i in range(gt):
                for k in range(gs):
                    rows[i, i * gs + k] += a[k, c]
                for l in range(gt):
                    rows[i, l * gs + c] -= b[i, l]
            eqs.append(rows)
    m = len(eqs)
    big = np.concatenate(eqs, axis=0)
    relblock = np.zeros((gt * m, rt.shape[1] * m), dtype=object)
    relblock[...] = 0
    for b in range(m):
        relblock[b * gt : (b + 1) * gt, b * rt.shape[1] : (b + 1) * rt.shape[1]] = rt
    system = np.concatenate([big, relblock], axis=1)
    ker = el.kernel_basis(as_matrix(system))
    vecs = ker[: gt * gs, :]
    basis = el.image_basis(vecs)
    return [as_matrix(basis[:, j].reshape(gt, gs), (gt, gs)) for j in range(basis.shape[1])]


# ---------------------------------------------------------------------------
# Homology


@dataclass
class Homology:
    """``H_i`` of a complex with its cycle projection.

    ``project`` takes flattened cycles (columns in the ``{g e_j}`` basis) to
    generator coordinates of ``module``; ``lift`` goes back to cycles.
    """

    degree: int
    module: PiModule
    proj: np.ndarray
    lift_matrix: np.ndarray
    cycles: np.ndarray

    def project(self, vecs) -> np.ndarray:
        return self.module.reduce(matmul(self.proj, as_matrix(vecs)))

    def lift(self, coords) -> np.ndarray:
        return matmul(self.lift_matrix, as_matrix(coords))

    def project_map(self, m: GroupRingMatrix) -> np.ndarray:
        """Values on basis elements of a map landing in cycles."""
        return self.project(m.column_form())

    def lift_values(self, values, rows: int) -> GroupRingMatrix:
        """Equivariant map into cycles realising the given basis values."""
        return GroupRingMatrix.from_columns(self.module.group, self.lift(values), rows)


def homology(k, i: int, reduced: bool = False) -> Homology:
    """``H_i(K)`` as a module; ``reduced`` gives ``ker(aug)/B_0`` for ``i == 0``."""
    g = k.group
    n = g.order
    dim = k.rank(i) * n
    if i == 0:
        z = el.kernel_basis(k.aug_row()) if reduced else el.identity(dim)
    else:
        z = el.kernel_basis(k.d(i).flatten())
    gz = z.shape[1]
    b = k.d(i + 1).flatten()
    w = el.left_inverse(z) if gz else zeros(0, dim)
    rel = matmul(w, b) if gz else zeros(0, 0)
    action = []
    for gamma in range(n):
        action.append(matmul(w, act_on_vectors(g, gamma, z, k.rank(i))) if gz else zeros(0, 0))
    raw = PiModule(g, gz, rel if rel.size else zeros(gz, 0), action, f"H{i}")
    mod, proj, lift = raw.simplified()
    return Homology(
        degree=i,
        module=mod,
        proj=matmul(proj, w) if gz else zeros(0, dim),
        lift_matrix=matmul(z, lift) if gz else zeros(dim, 0),
        cycles=z,
    )


def is_acyclic_below(k, q: int) -> bool:
    if not homology(k, 0, reduced=True).module.gens == 0:
        return False
    return all(homology(k, i).module.gens == 0 for i in range(1, q))


def induced_map(f_i: GroupRingMatrix, hs: Homology, ht: Homology, check: bool = True) -> PiModuleHom:
    """Map on homology induced by a chain map component."""
    cyc = hs.lift(el.identity(hs.module.gens))
    image = matmul(f_i.flatten(), cyc)
    return PiModuleHom(hs.module, ht.module, ht.project(image), check=check)


# ---------------------------------------------------------------------------
# Cochains


def coboundary_matrix(module: PiModule, d: GroupRingMatrix) -> np.ndarray:
    """Matrix of ``c -> c o d`` on vectorised cochains.

    ``d : P_{n+1} -> P_n``; a cochain on ``P_n`` is vectorised column by
    column (index ``j * g + a``).
    """
    gm = module.gens
    rows, cols = d.shape
    out = zeros(gm * cols, gm * rows)
    if gm == 0:
        return out
    for j in range(cols):
        for i in range(rows):
            coeffs = d.coeffs[i, j]
            if any(coeffs):
                out[j * gm : (j + 1) * gm, i * gm : (i + 1) * gm] = module.rho(coeffs)
    return out


def vec(values) -> np.ndarray:
    values = as_matrix(values)
    return as_matrix(values.T.reshape(-1, 1), (values.size, 1))


def unvec(v, gens: int) -> np.ndarray:
    v = as_matrix(v)
    r = v.shape[0] // gens if gens else 0
    return as_matrix(v.reshape(r, gens).T, (gens, r)) if gens else zeros(0, 0)


def relation_block(module: PiModule, r: int) -> np.ndarray:
    rel = module.relations
    gm, s = rel.shape
    out = zeros(gm * r, s * r)
    for b in range(r):
        out[b * gm : (b + 1) * gm, b * s : (b + 1) * s] = rel
    return out


def apply_coboundary(module: PiModule, d: GroupRingMatrix, values) -> np.ndarray:
    """``c o d`` for a cochain given by its basis values."""
    gm = module.gens
    values = as_matrix(values, (gm, d.rows)) if gm else zeros(0, d.rows)
    out = zeros(gm, d.cols)
    for j in range(d.cols):
        acc = zeros(gm, 1)
        for i in range(d.rows):
            coeffs = d.coeffs[i, j]
            if any(coeffs):
                acc = acc + matmul(module.rho(coeffs), values[:, i : i + 1])
        out[:, j : j + 1] = acc
    return module.reduce(out)


def precompose(values, m: GroupRingMatrix, module: PiModule) -> np.ndarray:
    """Cochain ``c o m`` for an arbitrary module map ``m``."""
    return apply_coboundary(module, m, values)


def solve_coboundary(module: PiModule, d_prev: GroupRingMatrix, values) -> Optional[np.ndarray]:
    """A cochain ``b`` with ``b o d_prev == values`` modulo relations, or None."""
    gm = module.gens
    if gm == 0:
        return zeros(0, d_prev.rows)
    delta = coboundary_matrix(module, d_prev)
    rel = relation_block(module, d_prev.cols)
    system = np.concatenate([delta, rel], axis=1) if rel.size else delta
    sol = el.solve_integer_system(as_matrix(system), vec(values))
    if sol is None:
        return None
    return module.reduce(unvec(sol[: delta.shape[1], :], gm))


def cochain_on_flat(module: PiModule, values, rank: int) -> np.ndarray:
    """Evaluation matrix of a cochain on flattened vectors of ``P = Z[G]^rank``."""
    gm = module.gens
    n = module.group.order
    values = as_matrix(values, (gm, rank)) if gm else zeros(0, rank)
    out = zeros(gm, rank * n)
    for j in range(rank):
        for g in range(n):
            out[:, j * n + g] = matmul(module.action[g], values[:, j : j + 1])[:, 0]
    return out


@dataclass(frozen=True)
class CohomologyGroup:
    """``H^n`` as ``sum Z/factors`` with cocycle representatives."""

    factors: tuple[int, ...]
    representatives: tuple[np.ndarray, ...]


def cohomology(module: PiModule, d_in: GroupRingMatrix, d_out: GroupRingMatrix) -> CohomologyGroup:
    """Cohomology at ``P_n`` where ``d_in : P_n -> P_{n-1}`` and
    ``d_out : P_{n+1} -> P_n``."""
    gm = module.gens
    r = d_in.cols
    if gm == 0 or r == 0:
        return CohomologyGroup((), ())
    dout = coboundary_matrix(module, d_out)
    relout = relation_block(module, d_out.cols)
    system = np.concatenate([dout, relout], axis=1) if relout.size else dout
    if system.shape[0] == 0:
        zgens = el.identity(gm * r)
    else:
        ker = el.kernel_basis(as_matrix(system))
        zgens = ker[: gm * r, :]
    din = coboundary_matrix(module, d_in)
    relin = relation_block(module, r)
    bgens = np.concatenate([din, relin], axis=1)
    sq = el.subquotient(zgens, as_matrix(bgens))
    reps = tuple(module.reduce(unvec(sq.representatives[:, i : i + 1], gm)) for i in range(len(sq.factors)))
    return CohomologyGroup(sq.factors, reps)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relkinv import catalog
from relkinv.chain import ChainMap, SubcomplexMarker, subcomplex
from relkinv.checks import automorphisms, nested_pullback_holds
from relkinv.groupring import GroupIso, GroupRingMatrix, cyclic_group
from relkinv.instances import coefficient_modules, random_complex, random_marker
from relkinv.kinvariant import (
    CohomologyClass,
    ExtensionDatum,
    KInvariantError,
    boundary_vanishing_check,
    classes_equal,
    cone_cohomology,
    cw_k_invariant,
    cylinder_datum,
    decide_extension,
    default_t,
    find_homotopy,
    k_invariant,
    phi_ev_delta_check,
    pullback_class,
    pushforward_coeff,
    resolution_comparison,
    restrict_scalars_class,
    verify_extension,
)
from relkinv.lifting import lift_augmented_map, periodic_cyclic_resolution
from relkinv.modules import PiModuleHom, homology, sign_module_cyclic, trivial_module


def identity_on(sub):
    return ChainMap(sub, sub, {i: GroupRingMatrix.identity(sub.group, sub.rank(i)) for i in range(sub.top + 1)}, sub.top)


@pytest.fixture(scope="module")
def rp2():
    return catalog.load("rp2")


@pytest.fixture(scope="module")
def rp2_periodic(rp2):
    return k_invariant(rp2, c=periodic_cyclic_resolution(2, 4))


# -- theta and the class ------------------------------------------------------


def test_simply_connected_class_is_zero():
    s2 = catalog.load("s2")
    kk = k_invariant(s2)
    assert kk.cls.cone.complex.rank(3) == 0 and kk.cls.is_zero()


def test_zero_second_homology_gives_zero_theta():
    lens = catalog.load("lens3")
    kk = k_invariant(lens)
    assert kk.h2.module.gens == 0 and kk.theta.values.size == 0 and kk.cls.is_zero()


def test_rp2_theta_is_a_cocycle(rp2_periodic):
    th = rp2_periodic.theta
    assert th.is_cocycle() and th.values.shape == (1, 1)
    assert rp2_periodic.h2.module.action[1].tolist() == [[-1]]


def test_rp2_class_is_nonzero_by_brute_force(rp2_periodic):
    """Coboundaries on the rank-one periodic resolution are ``gamma (t - 1)``,
    i.e. ``-2 gamma`` in the sign module; search them directly."""
    v = int(rp2_periodic.cls.values[0, 0])
    d3 = rp2_periodic.cls.cone.complex.d(3)
    assert list(d3.coeffs[0, 0]) == [-1, 1]
    assert not any(-2 * g == v for g in range(-abs(v) - 1, abs(v) + 2))
    assert not rp2_periodic.cls.is_zero()


def test_rp2_h3_is_z2(rp2_periodic):
    assert cone_cohomology(rp2_periodic.cls.cone, rp2_periodic.h2.module).factors == (2,)


def test_full_subcomplex_class(rp2):
    kk = k_invariant(rp2, SubcomplexMarker.full(rp2))
    assert kk.cls.cone.complex.rank(3) == kk.resolution.rank(3) + rp2.rank(2)
    assert kk.theta.is_cocycle()


def test_acyclicity_required():
    g = cyclic_group(2)
    k = catalog.load("rp2")
    from relkinv.chain import ChainComplex

    bad = ChainComplex(g, [1, 1], {1: GroupRingMatrix.zero(g, 1, 1)}, [1])
    with pytest.raises(KInvariantError):
        k_invariant(bad)
    assert k_invariant(k).cls is not None


# -- class arithmetic -----------------------------------------------------------


def test_classes_equal_examples(rp2_periodic, rng):
    c = rp2_periodic.cls
    assert classes_equal(c, c)
    gamma = rng.integers(-3, 4, size=(1, c.cone.complex.rank(2))).tolist()
    assert classes_equal(c, c.plus_coboundary(gamma))
    zero = CohomologyClass(c.cone, c.module, np.zeros_like(c.values))
    assert not classes_equal(zero, c)
    assert classes_equal(c + c, zero)


def test_classes_must_share_setting(rp2_periodic):
    c = rp2_periodic.cls
    k = catalog.load("rp2")
    other = k_invariant(k, SubcomplexMarker.skeleton(k, 1)).cls
    with pytest.raises(KInvariantError):
        classes_equal(c, other)


def test_pushforward_examples(rp2_periodic):
    c = rp2_periodic.cls
    m = c.module
    assert classes_equal(pushforward_coeff(c, PiModuleHom.identity(m)), c)
    assert pushforward_coeff(c, PiModuleHom.zero(m, m)).is_zero()
    assert pushforward_coeff(c, PiModuleHom(m, m, [[2]])).is_zero()
    assert classes_equal(pushforward_coeff(c, PiModuleHom(m, m, [[-1]])), c)


def test_pushforward_rejects_non_equivariant(rp2_periodic):
    c = rp2_periodic.cls
    triv = trivial_module(c.module.group)
    with pytest.raises((KInvariantError, ValueError)):
        pushforward_coeff(c, PiModuleHom(c.module, triv, [[1]], check=False))


# -- pullbacks -------------------------------------------------------------------


def test_pullback_identity(rp2):
    kk = k_invariant(rp2, SubcomplexMarker.skeleton(rp2, 1))
    sub = kk.choice.sub
    zero_psi = find_homotopy(kk.cls.cone.map.truncated(2), kk.cls.cone.map.truncated(2))
    back = pullback_class(kk.cls, kk.cls.cone, identity_on(sub), zero_psi)
    assert classes_equal(back, kk.cls)


def test_pullback_to_empty_is_absolute(rp2):
    kb = k_invariant(rp2, SubcomplexMarker.full(rp2))
    ke = k_invariant(rp2, SubcomplexMarker.empty(), kb.t)
    assert nested_pullback_holds(rp2, SubcomplexMarker.empty(), SubcomplexMarker.full(rp2))
    assert classes_equal(ke.cls, k_invariant(rp2, None, kb.t).cls)


def test_pullback_independent_of_psi(rp2, rng):
    kb = k_invariant(rp2, SubcomplexMarker.full(rp2))
    ks = k_invariant(rp2, SubcomplexMarker.skeleton(rp2, 1), kb.t)
    sub_s, _ = subcomplex(rp2, SubcomplexMarker.skeleton(rp2, 1))
    sub_b, _ = subcomplex(rp2, SubcomplexMarker.full(rp2))
    h = ChainMap(sub_s, sub_b, {i: GroupRingMatrix.identity(rp2.group, 1) if i < 2 else GroupRingMatrix.zero(rp2.group, 1, 0) for i in range(3)}, 2)
    from relkinv.lifting import relative_homotopy

    t_s = ks.cls.cone.map
    t_b = kb.cls.cone.map.compose(h)
    psi1 = relative_homotopy(t_s.truncated(2), t_b.truncated(2), 2)
    psi2 = relative_homotopy(t_s.truncated(2), t_b.truncated(2), 2, rng=rng)
    a = pullback_class(kb.cls, ks.cls.cone, h, psi1)
    b = pullback_class(kb.cls, ks.cls.cone, h, psi2)
    assert classes_equal(a, b) and classes_equal(a, ks.cls)


@given(st.integers(0, 10**6))
def test_nested_pullback_random(seed):
    rng = np.random.default_rng(seed)
    k = random_complex(rng, max_rank=2)
    big = random_marker(rng, k, 0.7)
    small = random_marker(rng, k, 0.5, inside=big)
    assert nested_pullback_holds(k, small, big)


@given(st.integers(0, 10**6))
def test_well_defined_and_independent_of_t(seed):
    rng = np.random.default_rng(seed)
    k = random_complex(rng, ["C1", "C2", "C2b", "C3", "C4"], max_rank=2)
    marker = random_marker(rng, k)
    base = k_invariant(k, marker)
    again = k_invariant(k, marker, base.t, rng=rng)
    assert classes_equal(base.cls, again.cls)
    t2 = lift_augmented_map(k, base.resolution, 3, rng=rng)
    other = k_invariant(k, marker, t2, rng=rng)
    transported = pullback_class(other.cls, base.cls.cone, identity_on(base.choice.sub))
    assert classes_equal(transported, base.cls)


@given(st.integers(0, 10**6))
def test_theta_cocycle_law(seed):
    rng = np.random.default_rng(seed)
    k = random_complex(rng, max_rank=3)
    kk = k_invariant(k, random_marker(rng, k), rng=rng)
    assert not any(kk.theta.coboundary().flat)


# -- restriction of scalars -----------------------------------------------------


def test_restriction_identity_and_round_trip():
    k = catalog.load("c3pres")
    c = k_invariant(k, SubcomplexMarker.skeleton(k, 1)).cls
    g = k.group
    ident = GroupIso(g, g, (0, 1, 2))
    same = restrict_scalars_class(ident, c)
    assert (same.values == c.values).all() and same.module.same_as(c.module)
    u = GroupIso(g, g, (0, 2, 1))
    moved = restrict_scalars_class(u, c)
    assert (moved.values == c.values).all()
    assert moved.cone.complex.d(1) != c.cone.complex.d(1)
    back = restrict_scalars_class(u.inverse(), moved)
    assert back.cone.complex.same_as(c.cone.complex) and back.module.same_as(c.module)
    assert (back.values == c.values).all()


def test_restriction_commutes_with_zero_test():
    k = catalog.load("rp2")
    c = k_invariant(k).cls
    for u in automorphisms(k.group):
        assert restrict_scalars_class(u, c).is_zero() == c.is_zero()


# -- the extension problem -------------------------------------------------------


def test_extension_identity_datum(rp2):
    d = ExtensionDatum.build(rp2, SubcomplexMarker.skeleton(rp2, 1), rp2, SubcomplexMarker.skeleton(rp2, 1))
    res = decide_extension(d)
    assert res.extends and verify_extension(res.f, d, res.homotopy)
    assert verify_extension(rp2.identity_map().truncated(3) if rp2.top >= 3 else ChainMap(rp2, rp2, {i: GroupRingMatrix.identity(rp2.group, rp2.rank(i)) for i in range(4)}, 3), d)


def test_extension_minus_identity(rp2):
    m = homology(rp2, 2).module
    d = ExtensionDatum.build(rp2, None, rp2, None, f=PiModuleHom(m, m, [[-1]]))
    res = decide_extension(d)
    assert res.extends and verify_extension(res.f, d, res.homotopy)


def test_extension_zero_is_obstructed(rp2):
    d = ExtensionDatum.build(rp2, None, rp2, None, f="zero")
    res = decide_extension(d)
    assert not res.extends
    assert not res.obstruction.is_zero()
    assert classes_equal(res.obstruction, res.k.cls.scaled(-1)) or classes_equal(res.obstruction, res.k.cls)


def test_verify_names_a_corrupted_degree(rp2):
    d = ExtensionDatum.build(rp2, None, rp2, None)
    res = decide_extension(d)
    f = res.f
    bump = GroupRingMatrix.from_entries(rp2.group, [[[1, 0]]])
    bad = ChainMap(f.source, f.target, {**f.maps, 2: f[2] + bump}, 3)
    check = verify_extension(bad, d)
    assert not check.ok and any("chain law" in x for x in check.failures)


def test_verify_catches_wrong_f_star(rp2):
    d = ExtensionDatum.build(rp2, None, rp2, None, f="identity")
    m = homology(rp2, 2).module
    d2 = ExtensionDatum.build(rp2, None, rp2, None, f=PiModuleHom(m, m, [[3]]))
    res = decide_extension(d)
    check = verify_extension(res.f, d2, check_classes=False)
    assert not check.ok and any("F on H_2" in x for x in check.failures)


def test_extension_rejects_mismatched_groups(rp2):
    with pytest.raises(KInvariantError):
        ExtensionDatum.build(rp2, None, catalog.load("c3pres"), None)


# -- CW pairs --------------------------------------------------------------------


def test_cw_empty_matches_k_invariant(rp2):
    t = default_t(rp2)
    a = cw_k_invariant(rp2, None, t)
    b = k_invariant(rp2, None, t)
    assert (a.cls.values == b.cls.values).all()


def test_change_of_resolution(rp2):
    k1 = cw_k_invariant(rp2, SubcomplexMarker.skeleton(rp2, 1), c=periodic_cyclic_resolution(2, 4))
    k2 = cw_k_invariant(rp2, SubcomplexMarker.skeleton(rp2, 1), c=catalog.load("c2res"))
    from relkinv.lifting import build_resolution

    k3 = cw_k_invariant(rp2, SubcomplexMarker.skeleton(rp2, 1), c=build_resolution(rp2.group, 4))
    for a, b in ((k1, k3), (k3, k1), (k2, k3)):
        comp = resolution_comparison(a, b)
        assert classes_equal(comp.transport(b.cls), a.cls)


def test_boundary_vanishing_examples(rp2, rng):
    assert boundary_vanishing_check(rp2, SubcomplexMarker.full(rp2))
    assert boundary_vanishing_check(rp2, SubcomplexMarker.skeleton(rp2, 1))
    c3 = random_complex(rng, ["C3", "C3b"], max_rank=2)
    assert boundary_vanishing_check(c3, SubcomplexMarker.skeleton(c3, 1))
    with pytest.raises(KInvariantError):
        boundary_vanishing_check(rp2, SubcomplexMarker.empty())


def test_phi_ev_delta_examples(rp2):
    rep = phi_ev_delta_check(rp2, sign_module_cyclic(rp2.group))
    assert rep.ok and rep.generators == 1
    c3 = catalog.load("c3pres")
    rep = phi_ev_delta_check(c3, trivial_module(c3.group))
    assert rep.ok and rep.generators >= 1
    rep = phi_ev_delta_check(c3, trivial_module(c3.group, 2))
    assert rep.ok and rep.generators == 0


@given(st.integers(0, 10**6))
def test_phi_ev_delta_random(seed):
    rng = np.random.default_rng(seed)
    k = random_complex(rng, max_rank=2)
    mods = coefficient_modules(k.group)
    assert phi_ev_delta_check(k, mods[int(rng.integers(len(mods)))]).ok


def test_vanishing_criterion_rp2(rp2):
    for m in (SubcomplexMarker.empty(), SubcomplexMarker.skeleton(rp2, 1), SubcomplexMarker.full(rp2)):
        kk = k_invariant(rp2, m)
        res = decide_extension(cylinder_datum(rp2, m, kk.t))
        assert res.extends == kk.cls.is_zero()

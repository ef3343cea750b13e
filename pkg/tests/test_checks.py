import numpy as np
import pytest

from relkinv import catalog
from relkinv.chain import SubcomplexMarker
from relkinv.checks import SUITES, automorphisms, random_extension_datum, search_extensions
from relkinv.groupring import cyclic_group, symmetric_group
from relkinv.kinvariant import ExtensionDatum, decide_extension, verify_extension
from relkinv.modules import PiModuleHom, homology


@pytest.mark.parametrize("name", sorted(set(SUITES) - {"round-trip"}))
def test_suites_pass_small(name):
    results = SUITES[name](np.random.default_rng(3), 2)
    assert results and all(r.ok for r in results), [r.detail for r in results if not r.ok]


def test_automorphism_counts():
    assert len(automorphisms(cyclic_group(3))) == 2
    assert len(automorphisms(cyclic_group(4))) == 2
    assert len(automorphisms(symmetric_group(3))) == 6


def test_search_finds_identity_extension():
    k = catalog.load("rp2")
    d = ExtensionDatum.build(k, SubcomplexMarker.skeleton(k, 1), k, SubcomplexMarker.skeleton(k, 1))
    found = search_extensions(d).found
    assert found is not None and verify_extension(found, d)


def test_search_agrees_with_obstruction():
    k = catalog.load("rp2")
    d = ExtensionDatum.build(k, None, k, None, f="zero")
    assert not decide_extension(d).extends
    assert search_extensions(d).found is None


def test_search_respects_f_star():
    k = catalog.load("rp2")
    m = homology(k, 2).module
    d = ExtensionDatum.build(k, None, k, None, f=PiModuleHom(m, m, [[-1]]))
    found = search_extensions(d).found
    assert found is not None and verify_extension(found, d)


def test_search_and_decision_agree_on_random_data():
    rng = np.random.default_rng(11)
    for _ in range(8):
        d = random_extension_datum(rng)
        res = decide_extension(d, rng=rng)
        hit = search_extensions(d).found
        if hit is not None:
            assert res.extends and verify_extension(hit, d)
        if not res.extends:
            assert hit is None

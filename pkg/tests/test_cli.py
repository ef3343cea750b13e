import json

import pytest
from click.testing import CliRunner

from relkinv import catalog
from relkinv.chain import restricted_complex
from relkinv.cli import main
from relkinv.groupring import GroupIso, cyclic_group, group_from_table
from relkinv.io import complex_to_json, dump_json


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args):
        return runner.invoke(main, [str(a) for a in args])

    return go


def test_validate(run, tmp_path):
    assert run("validate", "rp2.json").exit_code == 0
    data = complex_to_json(catalog.load("rp2"))
    data["differentials"]["2"] = [[[1, -1]]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    res = run("validate", bad)
    assert res.exit_code == 1 and "degree 2" in res.output
    broken = tmp_path / "broken.json"
    broken.write_text("{oops")
    assert run("validate", broken).exit_code == 2
    assert run("validate", tmp_path / "missing.json").exit_code == 2


def test_homology(run):
    res = run("homology", "rp2")
    assert res.exit_code == 0
    assert json.loads(res.output)["H2"]["action"] == [[[1]], [[-1]]]


def test_k_rp2_nonzero(run):
    res = run("k", "rp2.json")
    assert res.exit_code == 1
    out = json.loads(res.output)
    assert out["verdict"] == "nonzero" and out["h3_factors"] == [2]


def test_k_sphere_is_trivial(run):
    res = run("k", "s2.json")
    assert res.exit_code == 0 and json.loads(res.output)["verdict"] == "zero (trivial cone)"


def test_k_relative_reports_pullback(run, tmp_path):
    out_file = tmp_path / "k.json"
    res = run("k", "rp2", "--sub", "skeleton1", "-o", out_file)
    data = json.loads(res.output)
    assert data["pullback_consistent"] is True and data["sub"] == {"0": [0], "1": [0]}
    assert json.loads(out_file.read_text()) == data


def test_k_options(run):
    assert run("k", "rp2", "--resolution-top", "3").exit_code == 2
    assert run("k", "rp2", "--resolution-top", "5").exit_code == 1
    assert run("k", "rp2", "--sub", '{"2": [0]}').exit_code == 2
    assert run("k", "c3pres", "--sub", '{"0": [0], "1": [0]}').exit_code in (0, 1)


def test_k_rejects_non_acyclic(run, tmp_path):
    data = complex_to_json(catalog.load("c2res"))
    data["ranks"] = [1, 1]
    data["differentials"] = {"1": [[[0, 0]]]}
    p = tmp_path / "x.json"
    p.write_text(json.dumps(data))
    assert run("k", p).exit_code == 2


def test_extend_identity_and_obstruction(run):
    res = run("extend", "rp2", "rp2")
    assert res.exit_code == 0 and json.loads(res.output)["verified"] is True
    res = run("extend", "rp2", "rp2", "--F", "zero")
    assert res.exit_code == 1 and json.loads(res.output)["h3_factors"] == [2]
    assert run("extend", "rp2", "rp2", "--F", "[[-1]]").exit_code == 0
    assert run("extend", "rp2", "rp2", "--F", "[[1, 2]]").exit_code == 2


def test_extend_mismatched_groups(run):
    assert run("extend", "rp2", "c3pres").exit_code == 2


def relabelled_c4():
    """C4 with elements 1 and 2 swapped: a different table for the same group."""
    g = cyclic_group(4)
    p = (0, 2, 1, 3)  # new index -> old index
    q = {old: new for new, old in enumerate(p)}
    table = [[q[g.mul[p[a]][p[b]]] for b in range(4)] for a in range(4)]
    g2 = group_from_table(table)
    return g, g2, GroupIso(g2, g, p)


def test_extend_with_isomorphism(run, tmp_path):
    g, g2, v = relabelled_c4()
    from relkinv.chain import presentation_complex

    k = presentation_complex(g, [1], ["x^4"], "C4")
    k2 = restricted_complex(k, v)
    assert k2.group == g2 and k2.group != g
    src, tgt = tmp_path / "a.json", tmp_path / "b.json"
    dump_json(complex_to_json(k), src)
    dump_json(complex_to_json(k2), tgt)
    assert run("extend", src, tgt).exit_code == 2
    hfile = tmp_path / "h.json"
    hfile.write_text(json.dumps({"format": 1, "iso": list(v.inverse().mapping)}))
    res = run("extend", src, tgt, "--h", hfile)
    assert res.exit_code == 0, res.output
    hfile.write_text(json.dumps({"format": 1, "iso": [0, 1, 2, 3]}))
    assert run("extend", src, tgt, "--h", hfile).exit_code == 2


def test_extend_with_explicit_h(run, tmp_path):
    k = catalog.load("rp2")
    hfile = tmp_path / "h.json"
    hfile.write_text(json.dumps({"format": 1, "maps": {"0": [[[1, 0]]], "1": [[[1, 0]]]}}))
    res = run("extend", "rp2", "rp2", "--sub", "skeleton1", "--h", hfile)
    assert res.exit_code == 0, res.output
    hfile.write_text(json.dumps({"format": 1, "maps": {"0": [[[1, 0]]], "1": [[[2, 0]]]}}))
    assert run("extend", "rp2", "rp2", "--sub", "skeleton1", "--h", hfile).exit_code == 2


def test_check(run):
    res = run("check", "phi-ev-delta", "--seed", 1, "--trials", 2)
    assert res.exit_code == 0 and "passed" in res.output
    assert run("check", "well-defined", "--seed", 1, "--trials", 20).exit_code == 0
    assert run("check", "no-such-lemma").exit_code == 2


def test_check_is_deterministic(run):
    a = run("check", "nested-pullback", "--seed", 4, "--trials", 2).output
    b = run("check", "nested-pullback", "--seed", 4, "--trials", 2).output
    assert a == b


def test_resolve(run, tmp_path):
    out = tmp_path / "res.json"
    res = run("resolve", "rp2", "--top", 4, "-o", out)
    assert res.exit_code == 0
    data = json.loads(out.read_text())
    assert data["ranks"][0] == 1 and len(data["ranks"]) == 6
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"order": 3, "mul": cyclic_group(3).to_json()["mul"]}))
    assert run("resolve", g).exit_code == 0
    g.write_text(json.dumps({"order": 2, "mul": [[0, 1], [1, 1]]}))
    assert run("resolve", g).exit_code == 2

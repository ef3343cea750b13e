"""Command line driver.

Exit codes: 0 success, 1 a mathematically negative outcome (invalid,
nonzero, obstructed, failed trial), 2 unreadable input or bad usage.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import catalog
from .chain import ChainComplex, ChainError, ChainMap, SubcomplexMarker, restricted_complex, subcomplex, validate_complex
from .checks import SUITES, nested_pullback_holds
from .groupring import GroupTableError, group_from_json
from .io import (
    FormatError,
    chain_map_from_json,
    chain_map_to_json,
    complex_from_json,
    complex_to_json,
    dump_json,
    iso_from_json,
    load_json,
    matrix_to_json,
)
from .kinvariant import (
    ExtensionDatum,
    KInvariantError,
    cone_cohomology,
    cylinder_datum,
    decide_extension,
    k_invariant,
    verify_extension,
)
from .lifting import LiftError, cached_resolution, exactness_defects
from .modules import ModuleError, PiModuleHom, homology, is_acyclic_below


class InputError(click.ClickException):
    exit_code = 2


INPUT_ERRORS = (FormatError, ChainError, GroupTableError, ModuleError, ValueError, KeyError, OSError, json.JSONDecodeError)


def _read(path: str):
    p = catalog.resolve_path(path)
    if not p.exists():
        raise InputError(f"{path}: no such file or bundled example")
    try:
        return load_json(p)
    except (FormatError, OSError) as exc:
        raise InputError(str(exc)) from exc


def _complex(path: str) -> ChainComplex:
    data = _read(path)
    try:
        k = complex_from_json(data)
    except INPUT_ERRORS as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not k.name:
        k.name = Path(path).stem
    return k


def _marker(k: ChainComplex, spec: Optional[str]) -> SubcomplexMarker:
    """``none``, ``skeleton1`` (any ``skeletonN``), ``full``, inline JSON or
    a JSON file; defaults to the file's own ``sub`` field."""
    if spec is None:
        m = k.sub if k.sub is not None else SubcomplexMarker.empty()
    elif spec in ("none", "empty"):
        m = SubcomplexMarker.empty()
    elif spec == "full":
        m = SubcomplexMarker.full(k)
    elif spec.startswith("skeleton") and spec[8:].isdigit():
        m = SubcomplexMarker.skeleton(k, int(spec[8:]))
    else:
        try:
            data = json.loads(spec) if spec.lstrip().startswith("{") else load_json(spec)
            m = SubcomplexMarker.of(data.get("sub", data))
        except (INPUT_ERRORS + (AttributeError, TypeError)) as exc:
            raise InputError(f"cannot read subcomplex {spec!r}: {exc}") from exc
    problems = m.problems(k)
    if problems:
        raise InputError("; ".join(problems))
    return m


def _resolution(k: ChainComplex, top: int) -> ChainComplex:
    if top < 4:
        raise InputError("--resolution-top must be at least 4")
    return cached_resolution(k.group, top)


def _require_acyclic(k: ChainComplex):
    if not is_acyclic_below(k, 2):
        raise InputError(f"{k.name or 'complex'} is not acyclic in dimensions < 2")


def _emit(obj, output: Optional[str]):
    text = dump_json(obj)
    if output:
        Path(output).write_text(text + "\n")
    click.echo(text)


def _module_summary(m) -> dict:
    return {"gens": m.gens, "invariants": list(m.invariants()), **m.to_json()}


resolution_top = click.option("--resolution-top", default=4, show_default=True, type=int, help="Resolution exact through this degree (>= 4).")
output_opt = click.option("-o", "--output", type=click.Path(dir_okay=False), help="Also write the JSON report here.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Relative first k-invariants of chain complexes over finite group rings."""


@main.command()
@click.argument("file")
def validate(file):
    """Check d o d = 0, the augmentation and the subcomplex marking."""
    k = _complex(file)
    rep = validate_complex(k)
    if rep.ok:
        click.echo(f"{k.name}: valid (ranks {list(k.ranks)}, group of order {k.group.order})")
        return
    for msg in rep.failures:
        click.echo(f"{k.name}: {msg}")
    sys.exit(1)


@main.command("homology")
@click.argument("file")
@click.option("--reduced/--unreduced", default=True, help="Reduced H_0.")
def homology_cmd(file, reduced):
    """Homology modules with their group action."""
    k = _complex(file)
    if not validate_complex(k).ok:
        raise InputError("complex does not validate; run 'validate' first")
    out = {}
    for i in range(k.top + 1):
        out[f"H{i}"] = _module_summary(homology(k, i, reduced=reduced and i == 0).module)
    out["acyclic_below_2"] = is_acyclic_below(k, 2)
    _emit(out, None)


@main.command()
@click.argument("file")
@click.option("--sub", default=None, help="none, skeleton1, full, or marker JSON (inline or file).")
@resolution_top
@output_opt
def k(file, sub, resolution_top, output):
    """The relative k-invariant; exit 1 when it is nonzero."""
    cx = _complex(file)
    if not validate_complex(cx, require_aug=True).ok:
        raise InputError("complex does not validate")
    _require_acyclic(cx)
    marker = _marker(cx, sub)
    c = _resolution(cx, resolution_top)
    try:
        kk = k_invariant(cx, marker, c=c)
    except (KInvariantError, LiftError) as exc:
        raise InputError(str(exc)) from exc
    cone = kk.cls.cone.complex
    zero = kk.cls.is_zero()
    report = {
        "complex": cx.name,
        "sub": marker.to_json(),
        "resolution_ranks": list(c.ranks),
        "cone_ranks": list(cone.ranks),
        "coefficients": _module_summary(kk.h2.module),
        "representative": kk.cls.values.tolist(),
        "h3_factors": list(cone_cohomology(kk.cls.cone, kk.h2.module).factors),
    }
    if cone.rank(3) == 0 or kk.h2.module.gens == 0:
        report["verdict"] = "zero (trivial cone)" if cone.rank(3) == 0 else "zero (trivial coefficients)"
    else:
        by_extension = decide_extension(cylinder_datum(cx, marker, kk.t)).extends
        if by_extension != zero:
            raise click.ClickException("vanishing criterion disagrees with the coboundary solve")
        report["verdict"] = "zero" if zero else "nonzero"
    if not marker.is_empty():
        report["pullback_consistent"] = nested_pullback_holds(cx, marker, SubcomplexMarker.full(cx))
    _emit(report, output)
    if not zero or report.get("pullback_consistent") is False:
        sys.exit(1)


def _load_f(spec: str, datum_modules):
    if spec in ("identity", "zero"):
        return spec
    data = json.loads(spec) if spec.lstrip().startswith("[") else _read(spec)
    if isinstance(data, dict):
        data = data.get("matrix", data.get("F"))
    if not isinstance(data, list):
        raise InputError("F must be 'identity', 'zero' or an integer matrix")
    src, tgt = datum_modules
    try:
        mat = np.array(data, dtype=object).reshape(tgt.gens, src.gens)
        return PiModuleHom(src, tgt, mat)
    except INPUT_ERRORS as exc:
        raise InputError(f"F: {exc}") from exc


@main.command()
@click.argument("source")
@click.argument("target")
@click.option("--sub", default=None, help="Subcomplex L of the source.")
@click.option("--sub-target", default=None, help="Subcomplex L' of the target.")
@click.option("--h", "hfile", default=None, help="JSON with 'maps' for h: L -> L' and optionally 'iso'.")
@click.option("--F", "fspec", default="identity", show_default=True, help="identity, zero, a matrix or a JSON file.")
@resolution_top
@click.option("--seed", default=0, type=int, show_default=True)
@output_opt
def extend(source, target, sub, sub_target, hfile, fspec, resolution_top, seed, output):
    """Extend h to f: K -> K' on degrees 0..3 with f_* = F; exit 1 if obstructed."""
    k1 = _complex(source)
    k2 = _complex(target)
    for cx in (k1, k2):
        if not validate_complex(cx).ok:
            raise InputError(f"{cx.name} does not validate")
    hdata = _read(hfile) if hfile else {}
    if k1.group != k2.group:
        if "iso" not in hdata:
            raise InputError("complexes are over different groups; give 'iso' in the --h file")
        try:
            iso = iso_from_json(k1.group, k2.group, hdata["iso"])
        except INPUT_ERRORS as exc:
            raise InputError(f"iso: {exc}") from exc
        sub_spec = k2.sub
        k2 = restricted_complex(k2, iso)
        k2.sub = sub_spec
    _require_acyclic(k1)
    _require_acyclic(k2)
    m1 = _marker(k1, sub)
    m2 = _marker(k2, sub_target if sub_target is not None else sub)
    l1, _ = subcomplex(k1, m1)
    l2, _ = subcomplex(k2, m2)
    h = None
    if "maps" in hdata:
        try:
            h = chain_map_from_json(hdata, l1, l2)
        except INPUT_ERRORS as exc:
            raise InputError(f"h: {exc}") from exc
    modules = (homology(k1, 2).module, homology(k2, 2).module)
    f = _load_f(fspec, modules)
    c = _resolution(k1, resolution_top)
    try:
        datum = ExtensionDatum.build(k1, m1, k2, m2, h=h, f=f, c=c)
        res = decide_extension(datum, rng=np.random.default_rng(seed))
    except (KInvariantError, LiftError) as exc:
        raise InputError(str(exc)) from exc
    if res.extends:
        check = verify_extension(res.f, datum, res.homotopy)
        if not check:
            raise click.ClickException("constructed map failed verification: " + "; ".join(check.failures))
        report = {
            "extends": True,
            "f": chain_map_to_json(res.f)["maps"],
            "homotopy": {str(i): matrix_to_json(m) for i, m in sorted(res.homotopy.maps.items())},
            "verified": True,
        }
        _emit(report, output)
        return
    ob = res.obstruction
    report = {
        "extends": False,
        "obstruction": ob.values.tolist(),
        "coefficients": _module_summary(ob.module),
        "h3_factors": list(cone_cohomology(ob.cone, ob.module).factors),
    }
    _emit(report, output)
    sys.exit(1)


@main.command()
@click.argument("lemma")
@click.option("--seed", default=1, type=int, show_default=True)
@click.option("--trials", default=10, type=int, show_default=True)
@output_opt
def check(lemma, seed, trials, output):
    """Run a randomised identity suite; exit 1 on any failing trial."""
    if lemma not in SUITES:
        raise InputError(f"unknown lemma {lemma!r}; choose from {', '.join(sorted(SUITES))}")
    results = SUITES[lemma](np.random.default_rng(seed), trials)
    failed = [r for r in results if not r.ok]
    click.echo(f"{lemma}: {len(results) - len(failed)}/{len(results)} trials passed")
    if failed:
        _emit({"lemma": lemma, "seed": seed, "counterexample": failed[0].detail}, output)
        sys.exit(1)


@main.command()
@click.argument("source")
@click.option("--top", default=4, type=int, show_default=True, help="Exact through this degree.")
@output_opt
def resolve(source, top, output):
    """Free resolution of Z over the group of a complex or group JSON file."""
    data = _read(source)
    try:
        group = group_from_json(data["group"] if "group" in data else data)
    except INPUT_ERRORS as exc:
        raise InputError(f"{source}: {exc}") from exc
    if top < 1:
        raise InputError("--top must be at least 1")
    c = cached_resolution(group, top)
    if exactness_defects(c, top):
        raise click.ClickException("resolution failed its exactness check")
    _emit(complex_to_json(c), output)


if __name__ == "__main__":
    main()

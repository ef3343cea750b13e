"""Bundled example complexes.

The JSON files under ``data/`` are generated from the builders below
(``python3 -m relkinv.catalog``) and the test suite checks they agree.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Callable

from .chain import ChainComplex, SubcomplexMarker
from .groupring import GroupRingMatrix, cyclic_group, klein_four_group, trivial_group
from .chain import presentation_complex
from .io import complex_from_json, complex_to_json, dump_json, load_json
from .lifting import periodic_cyclic_resolution


def point() -> ChainComplex:
    return ChainComplex(trivial_group(), [1], {}, [1], name="point")


def sphere2() -> ChainComplex:
    g = trivial_group()
    return ChainComplex(g, [1, 0, 1], {}, [1], name="S2")


def rp2() -> ChainComplex:
    return presentation_complex(cyclic_group(2), [1], ["x^2"], "RP2")


def lens(n: int, name: str = "") -> ChainComplex:
    """Three-dimensional lens space model: ``t - 1``, norm, ``t - 1``."""
    g = cyclic_group(n)
    c = periodic_cyclic_resolution(n, 2, g)
    diffs = {i: c.d(i) for i in (1, 2, 3)}
    return ChainComplex(g, [1, 1, 1, 1], diffs, [1], name=name or f"L({n},1)")


def rp3() -> ChainComplex:
    return lens(2, "RP3")


def c3_presentation() -> ChainComplex:
    return presentation_complex(cyclic_group(3), [1], ["x^3"], "C3-pres")


def v4_presentation() -> ChainComplex:
    g = klein_four_group()
    return presentation_complex(g, [1, 2], ["xx", "yy", "xyXY"], "V4-pres")


def c2_resolution() -> ChainComplex:
    c = periodic_cyclic_resolution(2, 4)
    return ChainComplex(c.group, c.ranks, {i: c.d(i) for i in range(1, c.top + 1)}, [1], name="C2-res")


def c3_resolution() -> ChainComplex:
    c = periodic_cyclic_resolution(3, 4)
    return ChainComplex(c.group, c.ranks, {i: c.d(i) for i in range(1, c.top + 1)}, [1], name="C3-res")


BUILDERS: dict[str, Callable[[], ChainComplex]] = {
    "trivial": point,
    "s2": sphere2,
    "rp2": rp2,
    "rp3": rp3,
    "lens3": lambda: lens(3),
    "c3pres": c3_presentation,
    "v4pres": v4_presentation,
    "c2res": c2_resolution,
    "c3res": c3_resolution,
}


def data_dir() -> Path:
    return Path(str(resources.files("relkinv") / "data"))


def names() -> list[str]:
    return sorted(BUILDERS)


def load(name: str) -> ChainComplex:
    """A bundled complex by name (``rp2`` or ``rp2.json``)."""
    stem = name[:-5] if name.endswith(".json") else name
    path = data_dir() / f"{stem}.json"
    if not path.exists():
        raise KeyError(f"no bundled example {name!r}")
    return complex_from_json(load_json(path))


def resolve_path(name: str) -> Path:
    """A filesystem path, falling back to the bundled catalog."""
    p = Path(name)
    if p.exists():
        return p
    stem = name[:-5] if name.endswith(".json") else name
    q = data_dir() / f"{stem}.json"
    return q if q.exists() else p


def standard_markers(k: ChainComplex) -> dict[str, SubcomplexMarker]:
    """Empty, 1-skeleton and full markers."""
    return {
        "none": SubcomplexMarker.empty(),
        "skeleton1": SubcomplexMarker.skeleton(k, 1),
        "full": SubcomplexMarker.full(k),
    }


def write_all(directory=None):
    directory = Path(directory) if directory else data_dir()
    directory.mkdir(parents=True, exist_ok=True)
    for key, build in BUILDERS.items():
        dump_json(complex_to_json(build()), directory / f"{key}.json")


if __name__ == "__main__":
    write_all()

"""JSON encoding of groups, complexes, maps and modules (``"format": 1``)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .chain import ChainComplex, ChainMap, SubcomplexMarker
from .groupring import FiniteGroup, GroupIso, GroupRingMatrix, group_from_json, parse_element
from .modules import PiModule

FORMAT = 1


class FormatError(ValueError):
    """Input does not follow the JSON schema."""


def matrix_to_json(m: GroupRingMatrix) -> list:
    return [[[int(x) for x in m.coeffs[i, j]] for j in range(m.cols)] for i in range(m.rows)]


def matrix_from_json(group: FiniteGroup, data, rows: int, cols: int) -> GroupRingMatrix:
    if rows * cols == 0:
        return GroupRingMatrix.zero(group, rows, cols)
    if not isinstance(data, list) or len(data) != rows or any(len(r) != cols for r in data):
        raise FormatError(f"expected a {rows} x {cols} matrix")
    entries = [[parse_element(group, e) for e in r] for r in data]
    return GroupRingMatrix.from_entries(group, entries)


def complex_to_json(k: ChainComplex, include_group: bool = True) -> dict:
    out: dict[str, Any] = {"format": FORMAT}
    if k.name:
        out["name"] = k.name
    if include_group:
        out["group"] = k.group.to_json()
    out["ranks"] = list(k.ranks)
    out["differentials"] = {str(i): matrix_to_json(k.d(i)) for i in range(1, k.top + 1)}
    if k.aug is not None:
        out["aug"] = list(k.aug)
    if k.sub is not None:
        out["sub"] = k.sub.to_json()
    return out


def complex_from_json(data: dict, group: Optional[FiniteGroup] = None) -> ChainComplex:
    try:
        if data.get("format", FORMAT) != FORMAT:
            raise FormatError(f"unsupported format {data.get('format')!r}")
        if group is None:
            group = group_from_json(data["group"])
        ranks = [int(r) for r in data["ranks"]]
        diffs = {}
        for key, mat in data.get("differentials", {}).items():
            i = int(key)
            if not 1 <= i < len(ranks):
                raise FormatError(f"differential {i} outside the rank list")
            diffs[i] = matrix_from_json(group, mat, ranks[i - 1], ranks[i])
        sub = SubcomplexMarker.of(data["sub"]) if "sub" in data else None
        return ChainComplex(group, ranks, diffs, data.get("aug"), data.get("name", ""), sub)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed complex: {exc}") from exc


def chain_map_to_json(f: ChainMap) -> dict:
    return {"format": FORMAT, "maps": {str(i): matrix_to_json(f[i]) for i in range(f.bound + 1)}}


def chain_map_from_json(data: dict, source: ChainComplex, target: ChainComplex) -> ChainMap:
    maps = {}
    try:
        for key, mat in data["maps"].items():
            i = int(key)
            maps[i] = matrix_from_json(source.group, mat, target.rank(i), source.rank(i))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed chain map: {exc}") from exc
    for i in range(min(source.top, target.top) + 1):
        # a map into or out of a zero module is forced; it may be omitted
        if i not in maps and source.rank(i) * target.rank(i) == 0:
            maps[i] = GroupRingMatrix.zero(source.group, target.rank(i), source.rank(i))
    return ChainMap(source, target, maps)


def module_to_json(m: PiModule) -> dict:
    return {"format": FORMAT, **m.to_json()}


def iso_from_json(source: FiniteGroup, target: FiniteGroup, data) -> GroupIso:
    return GroupIso(source, target, tuple(int(x) for x in data))


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path=None) -> str:
    """One top-level key per line, compact values (hand-editable)."""
    if isinstance(obj, dict):
        items = [f" {json.dumps(str(k))}: {json.dumps(v, default=_default)}" for k, v in obj.items()]
        text = "{\n" + ",\n".join(items) + "\n}"
    else:
        text = json.dumps(obj, default=_default)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")

"""JSON encodings of complexes, covers, curves, cocycles, potentials and words."""

from __future__ import annotations

from typing import Any

import numpy as np

from .cocycle import UnitaryCocycle
from .fieldalg import FieldWord
from .flatpot import FlatPotential
from .poset import BaseComplex, CausalPoset


class SchemaError(ValueError):
    """Malformed input; ``field`` names the offending JSON path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _get(data: Any, key: str, where: str):
    if not isinstance(data, dict):
        raise SchemaError(where or "$", "expected an object")
    if key not in data:
        raise SchemaError(f"{where}.{key}" if where else key, "missing field")
    return data[key]


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(where, "expected a list")
    return value


def _real(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(where, "expected a number")
    return float(value)


def complex_from_json(data: dict) -> BaseComplex:
    verts = _list(_get(data, "vertices", ""), "vertices")
    edges = _list(_get(data, "edges", ""), "edges")
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError(f"edges[{i}]", "expected [u, v]")
    faces = _list(data.get("faces", []), "faces")
    for i, f in enumerate(faces):
        if not isinstance(f, list) or len(f) != 3:
            raise SchemaError(f"faces[{i}]", "expected three edge ids")
    try:
        return BaseComplex(tuple(verts), tuple(tuple(e) for e in edges), tuple(tuple(f) for f in faces))
    except (ValueError, TypeError) as exc:
        raise SchemaError("edges", str(exc)) from None


def complex_to_json(base: BaseComplex) -> dict:
    return {
        "vertices": list(base.vertices),
        "edges": [list(e) for e in base.edges],
        "faces": [list(f) for f in base.faces],
    }


def cover_from_json(data: dict, base: BaseComplex) -> CausalPoset:
    diamonds = _list(_get(data, "diamonds", ""), "diamonds")
    supports = {}
    for i, d in enumerate(diamonds):
        k = _get(d, "id", f"diamonds[{i}]")
        if isinstance(k, bool) or not isinstance(k, int):
            raise SchemaError(f"diamonds[{i}].id", "expected an integer")
        sup = _list(_get(d, "support", f"diamonds[{i}]"), f"diamonds[{i}].support")
        if k in supports:
            raise SchemaError(f"diamonds[{i}].id", "duplicate id")
        supports[k] = sup
    disjoint = data.get("disjoint")
    if disjoint is not None:
        disjoint = _list(disjoint, "disjoint")
        for i, pr in enumerate(disjoint):
            if not isinstance(pr, list) or len(pr) != 2:
                raise SchemaError(f"disjoint[{i}]", "expected [i, j]")
    try:
        return CausalPoset(base, supports, None if disjoint is None else [tuple(p) for p in disjoint])
    except ValueError as exc:
        raise SchemaError("diamonds", str(exc)) from None


def curve_from_json(data: dict) -> tuple[list, bool]:
    curve = _list(_get(data, "curve", ""), "curve")
    closed = data.get("closed", False)
    if not isinstance(closed, bool):
        raise SchemaError("closed", "expected a boolean")
    return curve, closed


def _pair(value, where: str) -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise SchemaError(where, "expected [re, im]")
    return complex(_real(value[0], where), _real(value[1], where))


def cocycle_to_json(z: UnitaryCocycle) -> dict:
    vals = []
    for (b, a), m in sorted(z.values.items()):
        vals.append({"pair": [b, a], "matrix": [[float(x.real), float(x.imag)] for x in m.ravel()]})
    return {"dim": z.dim, "values": vals}


def cocycle_from_json(data: dict, P: CausalPoset) -> UnitaryCocycle:
    n = _get(data, "dim", "")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("dim", "expected a positive integer")
    vals = {}
    for i, entry in enumerate(_list(_get(data, "values", ""), "values")):
        where = f"values[{i}]"
        pair = _list(_get(entry, "pair", where), f"{where}.pair")
        raw = _list(_get(entry, "matrix", where), f"{where}.matrix")
        if raw and isinstance(raw[0], list) and raw[0] and isinstance(raw[0][0], list):
            raw = [x for row in raw for x in row]
        if len(raw) != n * n:
            raise SchemaError(f"{where}.matrix", f"expected {n * n} entries")
        m = np.array([_pair(x, f"{where}.matrix") for x in raw]).reshape(n, n)
        vals[(int(pair[0]), int(pair[1]))] = m
    for (b, a), m in list(vals.items()):
        vals.setdefault((a, b), m.conj().T)
    return UnitaryCocycle(P, n, vals)


def potential_from_json(data: dict, base: BaseComplex) -> FlatPotential:
    entries = _list(_get(data, "weights", ""), "weights")
    weights = {}
    for i, e in enumerate(entries):
        where = f"weights[{i}]"
        edge = _list(_get(e, "edge", where), f"{where}.edge")
        if len(edge) != 2:
            raise SchemaError(f"{where}.edge", "expected [u, v]")
        w = _real(_get(e, "w", where), f"{where}.w")
        try:
            base.edge_index(edge[0], edge[1])
        except ValueError:
            raise SchemaError(f"{where}.edge", "not an edge of the base complex") from None
        key = (edge[0], edge[1])
        weights[key] = weights.get(key, 0.0) + w
    return FlatPotential.from_edges(base, weights)


def potential_to_json(A: FlatPotential) -> dict:
    return {"weights": [{"edge": list(e), "w": w} for e, w in zip(A.base.edges, A.weights)]}


def gauge_from_json(data: dict) -> dict:
    out = {}
    for i, e in enumerate(_list(_get(data, "chi", ""), "chi")):
        where = f"chi[{i}]"
        out[_get(e, "v", where)] = _real(_get(e, "x", where), f"{where}.x")
    return out


def word_to_json(w: FieldWord) -> dict:
    return {
        "scalar": [w.scalar.real + 0.0, w.scalar.imag + 0.0],
        "letters": [{"o": o, "dag": d} for o, d in w.letters],
    }


def word_from_json(data: dict) -> FieldWord:
    scalar = _pair(_get(data, "scalar", ""), "scalar")
    letters = []
    for i, e in enumerate(_list(_get(data, "letters", ""), "letters")):
        o = _get(e, "o", f"letters[{i}]")
        dag = _get(e, "dag", f"letters[{i}]")
        if not isinstance(dag, bool):
            raise SchemaError(f"letters[{i}].dag", "expected a boolean")
        letters.append((o, dag))
    return FieldWord(scalar, tuple(letters))

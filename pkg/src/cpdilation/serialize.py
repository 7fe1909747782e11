"""JSON encoding of every value type.

Complex matrices are arrays of rows with ``[re, im]`` entries. Block maps use
``"i,j"`` string keys; absent intertwiner blocks mean zero. NaN and infinities
are rejected on input.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import Algebra, AlgebraElement, make_algebra
from .bimodule import Bimodule, Intertwiner, make_bimodule
from .cpmap import CPMap, cpmap_from_kraus
from .dilation import GeneratingModule, Representation
from .errors import InvalidInputError
from .extremal import ExtremalityReport


def _reject_constant(name):
    raise InvalidInputError(f"non-finite number {name} in input")


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON: {exc}") from exc


def load_file(path) -> Any:
    try:
        return loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def dumps(obj: Any, indent: int | None = 2) -> str:
    return json.dumps(obj, indent=indent, allow_nan=False)


# --------------------------------------------------------------------------


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data, shape=None) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("matrix entries must be [re, im] pairs") from exc
    if arr.size == 0:
        rows = len(data) if isinstance(data, list) else 0
        arr = np.zeros((rows, 0, 2))
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidInputError("a matrix is an array of rows of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix entries must be finite")
    m = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and m.size == 0:
        m = np.zeros(shape, dtype=np.complex128)
    if shape is not None and m.shape != tuple(shape):
        raise InvalidInputError(f"matrix has shape {m.shape}, expected {tuple(shape)}")
    return m


def _key(k) -> str:
    return f"{k[0]},{k[1]}"


def _parse_key(s: str) -> tuple[int, int]:
    try:
        i, j = (int(t) for t in s.split(","))
    except ValueError as exc:
        raise InvalidInputError(f"bad block key {s!r}") from exc
    return i, j


def _need(data: dict, field: str):
    if not isinstance(data, dict) or field not in data:
        raise InvalidInputError(f"missing field {field!r}")
    return data[field]


# --------------------------------------------------------------------------


def algebra_to_json(alg: Algebra) -> dict:
    return {"blocks": list(alg.blocks)}


def algebra_from_json(data) -> Algebra:
    blocks = _need(data, "blocks")
    if not isinstance(blocks, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in blocks):
        raise InvalidInputError("blocks must be a list of integers")
    return make_algebra(blocks)


def element_to_json(x: AlgebraElement) -> dict:
    return {"algebra": algebra_to_json(x.parent), "data": [matrix_to_json(a) for a in x.data]}


def element_from_json(data) -> AlgebraElement:
    alg = algebra_from_json(_need(data, "algebra"))
    mats = _need(data, "data")
    if len(mats) != len(alg):
        raise InvalidInputError("one matrix per block is required")
    return alg.element([matrix_from_json(m, (n, n)) for m, n in zip(mats, alg.blocks)])


def bimodule_to_json(M: Bimodule) -> dict:
    return {"left": algebra_to_json(M.left), "right": algebra_to_json(M.right), "mult": [list(r) for r in M.mult]}


def bimodule_from_json(data) -> Bimodule:
    mult = _need(data, "mult")
    if not isinstance(mult, list) or not all(
        isinstance(r, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in r) for r in mult
    ):
        raise InvalidInputError("mult must be an integer matrix")
    left = algebra_from_json(_need(data, "left"))
    right = algebra_from_json(_need(data, "right"))
    if len(mult) != len(left):
        raise InvalidInputError("mult has the wrong number of rows")
    return make_bimodule(left, right, np.array(mult, dtype=np.int64).reshape(len(left), len(right)))


def intertwiner_to_json(f: Intertwiner) -> dict:
    return {
        "source": bimodule_to_json(f.source),
        "target": bimodule_to_json(f.target),
        "blocks": {_key(k): matrix_to_json(g) for k, g in f.blocks.items() if g.size},
    }


def intertwiner_from_json(data) -> Intertwiner:
    source = bimodule_from_json(_need(data, "source"))
    target = bimodule_from_json(_need(data, "target"))
    blocks = {}
    for s, m in _need(data, "blocks").items():
        i, j = _parse_key(s)
        if (i, j) not in source.keys():
            raise InvalidInputError(f"block key {s!r} out of range")
        blocks[(i, j)] = matrix_from_json(m, (target.mult[i][j], source.mult[i][j]))
    return Intertwiner(source, target, blocks)


def cpmap_to_json(f: CPMap) -> dict:
    return {
        "source": algebra_to_json(f.source),
        "target": algebra_to_json(f.target),
        "choi": {_key(k): matrix_to_json(c) for k, c in f.choi.items()},
    }


def cpmap_from_json(data) -> CPMap:
    A = algebra_from_json(_need(data, "source"))
    B = algebra_from_json(_need(data, "target"))
    if "kraus" in data:
        kraus = {}
        for s, ops in data["kraus"].items():
            i, j = _parse_key(s)
            if not (0 <= i < len(A) and 0 <= j < len(B)):
                raise InvalidInputError(f"block key {s!r} out of range")
            kraus[(i, j)] = [matrix_from_json(K, (B.blocks[j], A.blocks[i])) for K in ops]
        return cpmap_from_kraus(A, B, kraus)
    choi = {}
    for s, m in _need(data, "choi").items():
        i, j = _parse_key(s)
        if not (0 <= i < len(A) and 0 <= j < len(B)):
            raise InvalidInputError(f"block key {s!r} out of range")
        d = A.blocks[i] * B.blocks[j]
        choi[(i, j)] = matrix_from_json(m, (d, d))
    return CPMap(A, B, choi)


def module_to_json(X: GeneratingModule) -> dict:
    return {"base": algebra_to_json(X.base), "mult": list(X.mult)}


def module_from_json(data) -> GeneratingModule:
    mult = _need(data, "mult")
    if not isinstance(mult, list) or not all(isinstance(v, int) for v in mult):
        raise InvalidInputError("mult must be a list of integers")
    return GeneratingModule(algebra_from_json(_need(data, "base")), tuple(mult))


def representation_to_json(rep: Representation) -> dict:
    return {"environment": bimodule_to_json(rep.environment), "V": intertwiner_to_json(rep.V)}


def representation_from_json(data) -> Representation:
    return Representation(
        bimodule_from_json(_need(data, "environment")), intertwiner_from_json(_need(data, "V"))
    )


def report_to_json(report: ExtremalityReport) -> dict:
    return {
        "extremal": report.extremal,
        "kernel_dimension": report.kernel_dimension,
        "K": element_to_json(report.K),
        "witness": None if report.witness is None else element_to_json(report.witness),
        "environment": bimodule_to_json(report.representation.environment),
    }


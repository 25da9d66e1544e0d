"""JSON encoding of the algebra objects.

Rationals are decimal-integer or "num/den" strings; matrices carry
explicit shape; modules list free and integral generator rows; complex
numbers (finite-model operators) are [re, im] pairs.  Emission is
deterministic: sorted keys, two-space indent, trailing newline.
"""

from __future__ import annotations

import json

from gmpy2 import mpq

import numpy as np

from .cosets import BlockElement
from .exact import Mat, rat
from .modules import Module
from .relations import Relation


def rat_str(x) -> str:
    return str(rat(x))


def parse_rat(s) -> mpq:
    if isinstance(s, bool) or isinstance(s, float):
        raise ValueError(f"rational literals must be strings or ints, got {s!r}")
    if isinstance(s, int):
        return mpq(s)
    if isinstance(s, str):
        return mpq(s)
    raise ValueError(f"cannot parse rational from {s!r}")


def mat_json(m: Mat) -> dict:
    return {"rows": m.nrows, "cols": m.ncols,
            "data": [[rat_str(e) for e in row] for row in m.rows]}


def parse_mat(obj) -> Mat:
    data = [[parse_rat(e) for e in row] for row in obj["data"]]
    m = Mat(data, ncols=obj["cols"])
    if m.nrows != obj["rows"]:
        raise ValueError("matrix row count does not match its data")
    return m


def module_json(R: Module) -> dict:
    return {"ambient": R.ambient,
            "free": [[rat_str(e) for e in row] for row in R.free.rows],
            "int": [[rat_str(e) for e in row] for row in R.int_part.rows]}


def parse_module(obj, p) -> Module:
    free = [[parse_rat(e) for e in row] for row in obj.get("free", [])]
    integral = [[parse_rat(e) for e in row] for row in obj.get("int", [])]
    return Module(p, obj["ambient"], free=free, integral=integral)


def relation_json(r: Relation) -> dict:
    return {"src": r.src, "dst": r.dst, "module": module_json(r.body)}


def parse_relation(obj, p) -> Relation:
    return Relation(p, obj["src"], obj["dst"],
                    parse_module(obj["module"], p))


def block_json(g: BlockElement) -> dict:
    return {"alpha": g.alpha, "k": g.k, "m": g.m, "matrix": mat_json(g.matrix)}


def parse_block(obj) -> BlockElement:
    return BlockElement(obj["alpha"], obj["k"], obj["m"],
                        parse_mat(obj["matrix"]))


def complex_json(mat: np.ndarray) -> dict:
    return {"rows": mat.shape[0], "cols": mat.shape[1],
            "data": [[[float(e.real), float(e.imag)] for e in row]
                     for row in mat]}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"

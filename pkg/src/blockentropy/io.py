"""JSON constraint specs and run reports.

Complex matrices are row-major nested lists whose entries are ``[re, im]``
pairs; plain real numbers are accepted on input.  Example spec::

    {"blocks": [2, 2],
     "marginal": {"type": "singleton", "q": [0.5, 0.5]},
     "conditionals": [{"type": "full"}, {"type": "full"}]}

Marginal types: ``simplex``, ``singleton`` (key ``q``), ``vertices`` (key
``vertices``).  Conditional types: ``full``, ``fixed`` (key ``matrix``),
``hull`` (key ``matrices``).
"""
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .blocks import BlockDecomposition
from .constraints import BlockConvexSet, Full, Hull, MarginalPolytope, Singleton
from .core import as_probability
from .errors import BlockEntropyError, SpecParseError, SpecValidationError


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data, path="matrix"):
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise SpecValidationError(path, "expected a non-empty list of rows")
    n = len(data)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(data):
        if len(row) != n:
            raise SpecValidationError(f"{path}[{i}]", f"row has {len(row)} entries, expected {n}")
        for j, z in enumerate(row):
            if isinstance(z, (int, float)) and not isinstance(z, bool):
                out[i, j] = float(z)
            elif (isinstance(z, list) and len(z) == 2
                  and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)):
                out[i, j] = complex(z[0], z[1])
            else:
                raise SpecValidationError(f"{path}[{i}][{j}]", "expected a number or [re, im] pair")
    return out


def _require(obj, key, path):
    if not isinstance(obj, dict):
        raise SpecValidationError(path, "expected an object")
    if key not in obj:
        raise SpecValidationError(f"{path}.{key}", "missing field")
    return obj[key]


def _probability(data, path):
    if not isinstance(data, list):
        raise SpecValidationError(path, "expected a list of numbers")
    try:
        return as_probability(np.asarray(data, dtype=float))
    except (BlockEntropyError, TypeError, ValueError) as exc:
        raise SpecValidationError(path, str(exc)) from None


def _marginal_from_dict(m, r):
    kind = _require(m, "type", "marginal")
    if kind == "simplex":
        return MarginalPolytope.simplex(r)
    if kind == "singleton":
        q = _probability(_require(m, "q", "marginal"), "marginal.q")
        verts = [q]
        base = "marginal.q"
    elif kind == "vertices":
        raw = _require(m, "vertices", "marginal")
        if not isinstance(raw, list) or not raw:
            raise SpecValidationError("marginal.vertices", "expected a non-empty list")
        verts = [_probability(v, f"marginal.vertices[{k}]") for k, v in enumerate(raw)]
        base = "marginal.vertices"
    else:
        raise SpecValidationError("marginal.type", f"unknown marginal type {kind!r}")
    for k, v in enumerate(verts):
        if v.size != r:
            where = base if kind == "singleton" else f"{base}[{k}]"
            raise SpecValidationError(where, f"length {v.size}, expected {r} blocks")
    return MarginalPolytope(verts)


def _state(data, path, dim):
    m = decode_matrix(data, path)
    if m.shape != (dim, dim):
        raise SpecValidationError(path, f"shape {m.shape}, block dimension is {dim}")
    try:
        return Singleton(m).state
    except BlockEntropyError as exc:
        raise SpecValidationError(path, str(exc)) from None


def _conditional_from_dict(c, dim, path):
    kind = _require(c, "type", path)
    if kind == "full":
        return Full()
    if kind == "fixed":
        return Singleton(_state(_require(c, "matrix", path), f"{path}.matrix", dim))
    if kind == "hull":
        raw = _require(c, "matrices", path)
        if not isinstance(raw, list) or not raw:
            raise SpecValidationError(f"{path}.matrices", "expected a non-empty list")
        return Hull(tuple(_state(g, f"{path}.matrices[{k}]", dim) for k, g in enumerate(raw)))
    raise SpecValidationError(f"{path}.type", f"unknown conditional type {kind!r}")


def spec_from_dict(data) -> BlockConvexSet:
    blocks = _require(data, "blocks", "spec")
    if (not isinstance(blocks, list) or not blocks
            or not all(isinstance(b, int) and not isinstance(b, bool) and b >= 1 for b in blocks)):
        raise SpecValidationError("blocks", "expected a non-empty list of positive integers")
    marginal = _marginal_from_dict(_require(data, "marginal", "spec"), len(blocks))
    conds = _require(data, "conditionals", "spec")
    if not isinstance(conds, list) or len(conds) != len(blocks):
        raise SpecValidationError("conditionals", f"expected a list of {len(blocks)} entries")
    sets = [_conditional_from_dict(c, d, f"conditionals[{i}]")
            for i, (c, d) in enumerate(zip(conds, blocks))]
    return BlockConvexSet(BlockDecomposition(tuple(blocks)), marginal, sets)


def parse_spec(path) -> BlockConvexSet:
    """Load and validate a constraint spec file.

    Raises
    ------
    SpecParseError
        If the file cannot be read or is not a JSON object.
    SpecValidationError
        If the content does not describe a valid constraint set.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SpecParseError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise SpecParseError(f"{path}: top level must be a JSON object")
    return spec_from_dict(data)


def _is_simplex(pi):
    v = pi.vertices
    return (len(v) == pi.r and bool(np.all((v == 0.0) | (v == 1.0)))
            and sorted(np.argmax(v, axis=1).tolist()) == list(range(pi.r)))


def spec_to_dict(c: BlockConvexSet):
    pi = c.marginal
    if pi.is_singleton:
        marginal = {"type": "singleton", "q": pi.vertices[0].tolist()}
    elif _is_simplex(pi):
        marginal = {"type": "simplex"}
    else:
        marginal = {"type": "vertices", "vertices": pi.vertices.tolist()}
    conds = []
    for cs in c.conditionals:
        if isinstance(cs, Full):
            conds.append({"type": "full"})
        elif isinstance(cs, Singleton):
            conds.append({"type": "fixed", "matrix": encode_matrix(cs.state)})
        else:
            conds.append({"type": "hull", "matrices": [encode_matrix(g) for g in cs.generators]})
    return {"blocks": list(c.decomposition.block_dims), "marginal": marginal, "conditionals": conds}


def spec_digest(c: BlockConvexSet):
    text = json.dumps(spec_to_dict(c), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def to_jsonable(obj):
    """Recursively convert numpy values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) and obj.ndim == 2:
            return encode_matrix(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"

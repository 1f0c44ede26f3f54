"""JSON interchange documents.

A document is ``{"kind": ..., "format_version": 1, "payload": {...}}``.
Complex matrices are nested row-major lists of ``[re, im]`` pairs.  Parse
errors carry a JSON-pointer path relative to the payload.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .algebra import Algebra, AlgebraMatrix
from .bimodule import Bimodule, make_bimodule, mc_json
from .errors import AxiomViolationError, MoritaError
from .hilbert import HilbertModule, ModuleOperator
from .morita import InducedMap
from . import matrix_core as mc

FORMAT_VERSION = 1
KINDS = ("algebra", "module", "operator", "bimodule", "induced-map", "report", "linking-algebra")


class DocumentError(MoritaError):
    """Structured parse failure.

    ``category`` is one of ``"syntax"``, ``"unknown-kind"``, ``"version"``,
    ``"missing-field"``, ``"bad-value"`` or ``"invariant"``.
    """

    def __init__(self, category, path, message):
        super().__init__(f"{category} at {path or '/'}: {message}")
        self.category = category
        self.path = path
        self.message = message


@dataclass
class Document:
    kind: str
    payload: Any
    format_version: int = FORMAT_VERSION


@dataclass(frozen=True, eq=False)
class LinkingAlgebraDoc:
    """A concrete algebra of ``D x D`` matrices with a chosen corner projection."""

    space: mc.Subspace
    p_left: np.ndarray


# -- encoding ---------------------------------------------------------------


def encode(value) -> dict:
    """Payload dictionary for a domain value."""
    if isinstance(value, LinkingAlgebraDoc):
        return {"dim": int(value.space.shape[0]), "basis": [mc_json(b) for b in value.space.basis],
                "p_left": mc_json(value.p_left)}
    if isinstance(value, dict):
        return value
    return value.to_json()


def kind_of(value) -> str:
    for cls, kind in ((Algebra, "algebra"), (HilbertModule, "module"), (ModuleOperator, "operator"),
                      (Bimodule, "bimodule"), (InducedMap, "induced-map"),
                      (LinkingAlgebraDoc, "linking-algebra")):
        if isinstance(value, cls):
            return kind
    if isinstance(value, dict) and "properties" in value:
        return "report"
    raise TypeError(f"no document kind for {type(value).__name__}")


def serialize(doc: Document | Any, indent=None) -> str:
    if not isinstance(doc, Document):
        doc = Document(kind_of(doc), doc)
    payload = encode(doc.payload)
    return json.dumps({"kind": doc.kind, "format_version": doc.format_version, "payload": payload},
                      indent=indent)


# -- decoding ---------------------------------------------------------------


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise DocumentError("bad-value", path, "expected an object")
    if key not in obj:
        raise DocumentError("missing-field", f"{path}/{key}", f"missing field {key!r}")
    return obj[key]


def _int_list(v, path):
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise DocumentError("bad-value", path, "expected a list of integers")
    return v


def _cmatrix(v, path, shape=None):
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise DocumentError("bad-value", path, "expected a matrix of [re, im] pairs") from None
    if a.ndim == 2 and a.shape[1] == 0:
        a = a.reshape(a.shape[0], 0, 2)
    if a.ndim == 1 and a.size == 0:
        a = a.reshape(0, 0, 2)
    if a.ndim != 3 or a.shape[2] != 2:
        raise DocumentError("bad-value", path, "expected a matrix of [re, im] pairs")
    m = a[..., 0] + 1j * a[..., 1]
    if not np.all(np.isfinite(m)):
        raise DocumentError("bad-value", path, "non-finite entry")
    if shape is not None and m.shape != tuple(shape):
        if m.size == 0 and 0 in shape:
            return np.zeros(shape, dtype=complex)
        raise DocumentError("bad-value", path, f"matrix of shape {m.shape}, expected {tuple(shape)}")
    return m


def decode_algebra(p, path="") -> Algebra:
    blocks = _int_list(_get(p, "blocks", path), f"{path}/blocks")
    mults = _int_list(_get(p, "multiplicities", path), f"{path}/multiplicities")
    try:
        return Algebra(tuple(blocks), tuple(mults))
    except MoritaError as exc:
        raise DocumentError("invariant", path, str(exc)) from None


def decode_algebra_matrix(p, alg: Algebra, path="") -> AlgebraMatrix:
    rows, cols = _get(p, "rows", path), _get(p, "cols", path)
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise DocumentError("bad-value", path, "rows/cols must be nonnegative integers")
    ents = _get(p, "entries", path)
    if not isinstance(ents, list) or len(ents) != rows:
        raise DocumentError("bad-value", f"{path}/entries", f"expected {rows} rows")
    grid = []
    for r, row in enumerate(ents):
        if not isinstance(row, list) or len(row) != cols:
            raise DocumentError("bad-value", f"{path}/entries/{r}", f"expected {cols} entries")
        line = []
        for c, ent in enumerate(row):
            epath = f"{path}/entries/{r}/{c}"
            if not isinstance(ent, list) or len(ent) != alg.k:
                raise DocumentError("bad-value", epath, f"expected {alg.k} blocks")
            line.append([_cmatrix(b, f"{epath}/{i}", (n, n)) for i, (b, n) in enumerate(zip(ent, alg.block_sizes))])
        grid.append(line)
    if rows == 0 or cols == 0:
        return AlgebraMatrix.zeros(alg, rows, cols)
    return AlgebraMatrix.from_entries(alg, grid)


def decode_module(p, path="") -> HilbertModule:
    alg = decode_algebra(_get(p, "algebra", path), f"{path}/algebra")
    n = _get(p, "ambient_rank", path)
    proj = decode_algebra_matrix(_get(p, "projection", path), alg, f"{path}/projection")
    if proj.shape != (n, n):
        raise DocumentError("invariant", f"{path}/projection", f"projection is not {n}x{n}")
    try:
        return HilbertModule(alg, proj)
    except MoritaError as exc:
        raise DocumentError("invariant", f"{path}/projection", str(exc)) from None


def decode_operator(p, path="") -> ModuleOperator:
    m = decode_module(_get(p, "domain", path), f"{path}/domain")
    n = decode_module(_get(p, "codomain", path), f"{path}/codomain")
    if m.algebra != n.algebra:
        raise DocumentError("invariant", path, "domain and codomain over different algebras")
    t = decode_algebra_matrix(_get(p, "matrix", path), m.algebra, f"{path}/matrix")
    try:
        return ModuleOperator(m, n, t)
    except MoritaError as exc:
        raise DocumentError("invariant", f"{path}/matrix", str(exc)) from None


def _decode_side(p, path):
    alg_p = _get(p, "algebra", path)
    alg = decode_algebra(alg_p, f"{path}/algebra")
    if "multiplicities" in p:
        mults = _int_list(p["multiplicities"], f"{path}/multiplicities")
        if tuple(mults) != alg.multiplicities:
            raise DocumentError("invariant", f"{path}/multiplicities", "disagrees with the algebra's multiplicities")
    return alg


def decode_bimodule(p, path="", tol=mc.DEFAULT_TOL) -> Bimodule:
    left = _decode_side(_get(p, "left", path), f"{path}/left")
    right = _decode_side(_get(p, "right", path), f"{path}/right")
    basis_p = _get(p, "basis", path)
    if not isinstance(basis_p, list):
        raise DocumentError("bad-value", f"{path}/basis", "expected a list of matrices")
    shape = (left.ambient_dim, right.ambient_dim)
    basis = [_cmatrix(b, f"{path}/basis/{i}", shape) for i, b in enumerate(basis_p)]
    try:
        return make_bimodule(left, right, basis, tol)
    except AxiomViolationError as exc:
        err = DocumentError("invariant", f"{path}/basis", str(exc))
        err.axiom = exc.axiom
        raise err from None


def decode_induced_map(p, path="") -> InducedMap:
    src = decode_algebra(_get(p, "source", path), f"{path}/source")
    tgt = decode_algebra(_get(p, "target", path), f"{path}/target")
    mat = _get(p, "matrix", path)
    if not isinstance(mat, list) or not all(isinstance(r, list) for r in mat):
        raise DocumentError("bad-value", f"{path}/matrix", "expected a list of integer rows")
    for i, r in enumerate(mat):
        _int_list(r, f"{path}/matrix/{i}")
    try:
        return InducedMap(src, tgt, tuple(tuple(r) for r in mat))
    except MoritaError as exc:
        raise DocumentError("invariant", f"{path}/matrix", str(exc)) from None


def decode_linking(p, path="") -> LinkingAlgebraDoc:
    d = _get(p, "dim", path)
    basis = [_cmatrix(b, f"{path}/basis/{i}", (d, d)) for i, b in enumerate(_get(p, "basis", path))]
    pl = _cmatrix(_get(p, "p_left", path), f"{path}/p_left", (d, d))
    return LinkingAlgebraDoc(mc.onb_span(basis, shape=(d, d)), pl)


def decode_report(p, path=""):
    for key in ("suite", "seed", "properties", "wall_ms"):
        _get(p, key, path)
    return p


_DECODERS = {
    "algebra": decode_algebra, "module": decode_module, "operator": decode_operator,
    "bimodule": decode_bimodule, "induced-map": decode_induced_map, "report": decode_report,
    "linking-algebra": decode_linking,
}


def parse(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("syntax", "", str(exc)) from None
    if not isinstance(raw, dict):
        raise DocumentError("syntax", "", "document must be a JSON object")
    for key in ("kind", "format_version", "payload"):
        if key not in raw:
            raise DocumentError("missing-field", f"/{key}", f"document lacks {key!r}")
    kind = raw["kind"]
    if kind not in _DECODERS:
        raise DocumentError("unknown-kind", "/kind", f"unknown kind {kind!r}")
    if raw["format_version"] != FORMAT_VERSION:
        raise DocumentError("version", "/format_version",
                            f"version {raw['format_version']!r}, expected {FORMAT_VERSION}")
    return Document(kind, _DECODERS[kind](raw["payload"]), raw["format_version"])


def load(path) -> Document:
    with open(path) as fh:
        return parse(fh.read())


def dump(value, path, indent=1):
    with open(path, "w") as fh:
        fh.write(serialize(value, indent=indent))
        fh.write("\n")

"""Canonical small examples, written out by ``moritak examples --write DIR``."""

from __future__ import annotations

import os

import numpy as np

from .algebra import Algebra, AlgebraMatrix, make_algebra
from .bimodule import Bimodule, linking_algebra, make_bimodule
from .documents import LinkingAlgebraDoc, dump
from .fredholm import standard_index_op
from .hilbert import HilbertModule, ModuleOperator
from .morita import multiplicity_matrix

# a bimodule document that breaks the inner-product axiom for the left algebra:
# x x* = diag(1, 0) is not a multiple of the identity
CORRUPTED_BIMODULE = """{
 "kind": "bimodule", "format_version": 1,
 "payload": {
  "left": {"algebra": {"blocks": [1], "multiplicities": [2]}},
  "right": {"algebra": {"blocks": [1], "multiplicities": [1]}},
  "basis": [[[[1.0, 0.0]], [[0.0, 0.0]]]]
 }
}
"""


def column_space(n: int) -> Bimodule:
    """``C^n`` over ``(M_n, C)``."""
    basis = [np.eye(n, dtype=complex)[:, [i]] for i in range(n)]
    return make_bimodule(make_algebra([n]), make_algebra([1]), basis)


def unit_bimodule(alg: Algebra) -> Bimodule:
    """``A`` as an ``A``-``A`` bimodule."""
    return make_bimodule(alg, alg, [alg.embed(e) for e in alg.basis()])


def rectangular(left_sizes, right_sizes) -> Bimodule:
    """``(+)_i C^{n_i x m_i}`` over ``((+) M_{n_i}, (+) M_{m_i})``."""
    a, b = make_algebra(left_sizes), make_algebra(right_sizes)
    basis = []
    for i, (n, m) in enumerate(zip(left_sizes, right_sizes)):
        for r in range(n):
            for c in range(m):
                x = np.zeros((a.ambient_dim, b.ambient_dim), dtype=complex)
                x[a.offsets[i] + r, b.offsets[i] + c] = 1.0
                basis.append(x)
    return make_bimodule(a, b, basis)


def zero_operator() -> ModuleOperator:
    """``0: A^2 -> A^1`` over ``C``; index ``(1)``."""
    c = make_algebra([1])
    return ModuleOperator.zero(HilbertModule.free(c, 2), HilbertModule.free(c, 1))


def index_operator() -> ModuleOperator:
    """``v -> q v`` from ``A^2`` onto the first coordinate, over ``M_2 + M_3``."""
    a = make_algebra([2, 3])
    q = AlgebraMatrix.scalar(a, np.diag([1.0, 0.0]))
    return standard_index_op(AlgebraMatrix.identity(a, 2), q)


def canonical() -> dict:
    """Name -> domain value for every catalog entry."""
    cn3 = column_space(3)
    c_cc = rectangular([1], [1])
    link = linking_algebra(c_cc)
    return {
        "algebra_m2_m3": make_algebra([2, 3]),
        "free_module_m2_m3": HilbertModule.free(make_algebra([2, 3]), 2),
        "cn3": cn3,
        "unit_m2_m1": unit_bimodule(make_algebra([2, 1])),
        "m2m1_to_m3m7": rectangular([2, 1], [3, 7]),
        "chain_c_m2": rectangular([1], [2]),
        "chain_m2_c": rectangular([2], [1]),
        "c_over_cc": c_cc,
        "zero_op": zero_operator(),
        "index_op": index_operator(),
        "induced_cn3": multiplicity_matrix(cn3),
        "linking_c_over_cc": LinkingAlgebraDoc(link.space, link.p_left),
    }


def write_catalog(directory) -> list:
    """Write every entry as ``NAME.json`` plus ``negative/corrupted_bimodule.json``."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, value in canonical().items():
        path = os.path.join(directory, f"{name}.json")
        dump(value, path)
        written.append(path)
    neg = os.path.join(directory, "negative")
    os.makedirs(neg, exist_ok=True)
    path = os.path.join(neg, "corrupted_bimodule.json")
    with open(path, "w") as fh:
        fh.write(CORRUPTED_BIMODULE)
    written.append(path)
    return written


__all__ = ["canonical", "write_catalog", "column_space", "unit_bimodule", "rectangular",
           "zero_operator", "index_operator", "CORRUPTED_BIMODULE"]

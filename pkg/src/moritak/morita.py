"""The map ``X_*: K_0(A) -> K_0(B)`` induced by a Hilbert bimodule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrix_core as mc
from .algebra import Algebra, AlgebraMatrix, K0Class, dsum, minimal_projection
from .bimodule import (Bimodule, conjugate, internal_tensor, is_left_full,
                       is_right_full, op_tensor)
from .errors import InvalidInputError, PreconditionError
from .fredholm import index, standard_index_op

K1_NOTE = ("K1 is not computed: every finite-dimensional C*-algebra has K1 = 0, and the "
           "suspension C0(R) (x) A needed for the K1 statement has no finite-dimensional model.")


@dataclass(frozen=True)
class InducedMap:
    """Integer ``k_B x k_A`` matrix acting on K0 column vectors."""

    source: Algebra
    target: Algebra
    matrix: tuple

    def __post_init__(self):
        mat = tuple(tuple(int(v) for v in row) for row in self.matrix)
        if len(mat) != self.target.k or any(len(r) != self.source.k for r in mat):
            raise InvalidInputError(f"induced map must be {self.target.k}x{self.source.k}")
        object.__setattr__(self, "matrix", mat)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.target.k, self.source.k)

    def __call__(self, c: K0Class) -> K0Class:
        if c.parent.block_sizes != self.source.block_sizes:
            raise InvalidInputError("class is not over the source algebra")
        return K0Class(self.target, tuple(int(v) for v in self.array @ np.array(c.vector, dtype=np.int64)))

    def then(self, other: "InducedMap") -> "InducedMap":
        """``other o self``."""
        return InducedMap(self.source, other.target, tuple(map(tuple, other.array @ self.array)))

    def is_permutation(self) -> bool:
        a = self.array
        return (a.shape[0] == a.shape[1] and np.all((a == 0) | (a == 1))
                and np.all(a.sum(axis=0) == 1) and np.all(a.sum(axis=1) == 1))

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "matrix": [list(r) for r in self.matrix]}


def tensored_index(T, X: Bimodule, tol=mc.DEFAULT_TOL) -> K0Class:
    """``ind(T (x) I_X)`` in ``K_0(B)``."""
    return index(op_tensor(T, X, tol).as_operator(), tol)


def generator_representative(alg: Algebra, i: int):
    """``e_i A -> 0``: index ``delta_i``."""
    e = minimal_projection(alg, i)
    return standard_index_op(e, AlgebraMatrix.zeros(alg, 1, 1))


def second_representative(alg: Algebra, i: int, pad: AlgebraMatrix | None = None):
    """Another operator of index ``delta_i``: ``(e_i + r) A^{1+n} -> (0 + r) A^{1+n}``."""
    if pad is None:
        pad = AlgebraMatrix.identity(alg, 1)
    e = minimal_projection(alg, i)
    z = AlgebraMatrix.zeros(alg, 1, 1)
    return standard_index_op(dsum(e, pad), dsum(z, pad))


def induced_map_fredholm(X: Bimodule, tol=mc.DEFAULT_TOL, check_full=True) -> InducedMap:
    """Column ``i`` is ``ind(T_i (x) I_X)`` for ``T_i: e_i A -> 0``."""
    if check_full and not is_left_full(X, tol):
        raise PreconditionError("the induced map needs a left-full bimodule")
    cols = [tensored_index(generator_representative(X.left, i), X, tol).vector
            for i in range(X.left.k)]
    mat = np.array(cols, dtype=np.int64).T.reshape(X.right.k, X.left.k)
    return InducedMap(X.left, X.right, tuple(map(tuple, mat)))


def multiplicity_matrix(X: Bimodule, tol=mc.DEFAULT_TOL) -> InducedMap:
    """Entry ``(j, i)`` is ``dim(e_i X f_j)`` for minimal projections ``e_i`` and ``f_j``."""
    A, B = X.left, X.right
    mat = np.zeros((B.k, A.k), dtype=np.int64)
    for i in range(A.k):
        e = A.embed(A.matrix_unit(i, 0, 0))
        for j in range(B.k):
            f = B.embed(B.matrix_unit(j, 0, 0))
            mat[j, i] = mc.onb_span([e @ x @ f for x in X.basis], tol, shape=X.shape, scale=1.0).dim
    return InducedMap(A, B, tuple(map(tuple, mat)))


def verify_functoriality(X: Bimodule, Y: Bimodule, tol=mc.DEFAULT_TOL) -> bool:
    """``(X (x)_B Y)_* = Y_* o X_*`` as integer matrices."""
    if X.right != Y.left:
        raise PreconditionError("middle representations differ")
    if not is_left_full(X, tol):
        raise PreconditionError("X is not left-full")
    if not is_left_full(Y, tol):
        raise PreconditionError("Y is not left-full")
    xy = internal_tensor(X, Y, tol)
    lhs = induced_map_fredholm(xy, tol)
    rhs = induced_map_fredholm(X, tol).then(induced_map_fredholm(Y, tol))
    return lhs == rhs


@dataclass
class MoritaReport:
    forward: InducedMap
    backward: InducedMap
    back_forth: np.ndarray
    forth_back: np.ndarray
    ok: bool
    permutation: bool
    failures: list = field(default_factory=list)
    note: str = K1_NOTE

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"forward": self.forward.to_json(), "backward": self.backward.to_json(),
                "conj_after": self.back_forth.tolist(), "after_conj": self.forth_back.tolist(),
                "isomorphism": self.ok, "permutation": self.permutation,
                "failures": self.failures, "k1": self.note}


def verify_morita_iso(X: Bimodule, tol=mc.DEFAULT_TOL) -> MoritaReport:
    """Check that ``X_*`` is invertible over the integers with inverse ``(X*)_*``."""
    if not is_left_full(X, tol) or not is_right_full(X, tol):
        raise PreconditionError("not an imprimitivity bimodule (needs left- and right-full)")
    fwd = induced_map_fredholm(X, tol)
    bwd = induced_map_fredholm(conjugate(X), tol)
    bf = bwd.array @ fwd.array
    fb = fwd.array @ bwd.array
    failures = []
    for i in range(X.left.k):
        if not np.array_equal(bf[:, i], np.eye(X.left.k, dtype=np.int64)[:, i]):
            failures.append(f"(X*)_* X_* moves generator {i} of K0(A) to {bf[:, i].tolist()}")
    for j in range(X.right.k):
        if not np.array_equal(fb[:, j], np.eye(X.right.k, dtype=np.int64)[:, j]):
            failures.append(f"X_* (X*)_* moves generator {j} of K0(B) to {fb[:, j].tolist()}")
    return MoritaReport(fwd, bwd, bf, fb, not failures, fwd.is_permutation(), failures)

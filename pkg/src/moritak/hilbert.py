"""Projective Hilbert modules ``p A^n`` and adjointable maps between them."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import matrix_core as mc
from .algebra import (Algebra, AlgebraElement, AlgebraMatrix, K0Class,
                      block_matrix, dsum as _mat_dsum, idempotent_to_projection,
                      k0_of_projection, mv_partial_isometry)
from .errors import InvalidInputError, NoEquivalenceError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HilbertModule:
    """The right module ``M = p A^n`` with inner product ``<v, w> = v* w``."""

    algebra: Algebra
    projection: AlgebraMatrix
    tol: float = mc.DEFAULT_TOL

    def __post_init__(self):
        p = self.projection
        if p.parent != self.algebra:
            raise InvalidInputError("projection is over a different algebra")
        if p.rows != p.cols:
            raise InvalidInputError("projection must be square")
        if p.rows and not p.is_projection(self.tol):
            raise InvalidInputError(
                f"not a self-adjoint idempotent (residual {p.projection_residual():.3e})")

    @property
    def ambient_rank(self) -> int:
        return self.projection.rows

    @classmethod
    def free(cls, alg: Algebra, n: int) -> "HilbertModule":
        return cls(alg, AlgebraMatrix.identity(alg, n))

    @classmethod
    def zero(cls, alg: Algebra, n: int = 0) -> "HilbertModule":
        return cls(alg, AlgebraMatrix.zeros(alg, n, n))

    @classmethod
    def from_idempotent(cls, e: AlgebraMatrix, tol=mc.DEFAULT_TOL) -> "HilbertModule":
        """Module isomorphic to ``e A^n`` for a not necessarily self-adjoint idempotent."""
        r, _ = idempotent_to_projection(e, tol)
        return cls(e.parent, r, tol)

    def identity(self) -> "ModuleOperator":
        return ModuleOperator(self, self, self.projection)

    def same_as(self, other: "HilbertModule", tol=1e-9) -> bool:
        return (self.algebra == other.algebra and self.ambient_rank == other.ambient_rank
                and self.projection.allclose(other.projection, tol))

    def element(self, vector: AlgebraMatrix) -> "ModuleElement":
        return ModuleElement(self, vector)

    def columns(self):
        """The columns of ``p``; they generate the module."""
        return [ModuleElement(self, self.projection.column(c)) for c in range(self.ambient_rank)]

    def to_json(self) -> dict:
        return {"algebra": self.algebra.to_json(), "ambient_rank": self.ambient_rank,
                "projection": self.projection.to_json()}


@dataclass(frozen=True, eq=False)
class ModuleElement:
    parent: HilbertModule
    vector: AlgebraMatrix

    def __post_init__(self):
        v, m = self.vector, self.parent
        if v.shape != (m.ambient_rank, 1):
            raise InvalidInputError(f"element of shape {v.shape}, expected ({m.ambient_rank}, 1)")
        resid = (m.projection @ v - v).norm() if m.ambient_rank else 0.0
        if resid > m.tol * max(1.0, v.norm()):
            raise InvalidInputError(f"vector is not in the module (residual {resid:.3e})")

    def __add__(self, other):
        return ModuleElement(self.parent, self.vector + other.vector)

    def __mul__(self, a: AlgebraElement):
        return ModuleElement(self.parent, self.vector.right_mul(a))

    def __rmul__(self, scalar):
        return ModuleElement(self.parent, scalar * self.vector)


def inner(v: ModuleElement, w: ModuleElement) -> AlgebraElement:
    """``<v, w> = v* w``, conjugate linear in ``v``."""
    if v.parent is not w.parent and not v.parent.same_as(w.parent):
        raise InvalidInputError("elements of different modules")
    if v.parent.ambient_rank == 0:
        return v.parent.algebra.zero()
    return (v.vector.H @ w.vector).entry(0, 0)


def module_rank(m: HilbertModule) -> K0Class:
    return k0_of_projection(m.projection, m.tol)


def direct_sum(m: HilbertModule, n: HilbertModule) -> HilbertModule:
    if m.algebra != n.algebra:
        raise InvalidInputError("direct sum of modules over different algebras")
    return HilbertModule(m.algebra, _mat_dsum(m.projection, n.projection), min(m.tol, n.tol))


@dataclass(frozen=True, eq=False)
class ModuleOperator:
    """Adjointable ``T: M -> N`` stored as ``t`` with ``q t p = t``."""

    domain: HilbertModule
    codomain: HilbertModule
    matrix: AlgebraMatrix

    def __post_init__(self):
        t, m, n = self.matrix, self.domain, self.codomain
        if m.algebra != n.algebra or t.parent != m.algebra:
            raise InvalidInputError("operator, domain and codomain must share one algebra")
        if t.shape != (n.ambient_rank, m.ambient_rank):
            raise InvalidInputError(f"matrix of shape {t.shape}, expected {(n.ambient_rank, m.ambient_rank)}")
        if t.rows and t.cols:
            resid = (n.projection @ t @ m.projection - t).norm()
            if resid > max(m.tol, n.tol) * max(1.0, t.norm()):
                raise InvalidInputError(f"compression condition q t p = t fails (residual {resid:.3e})")

    @classmethod
    def compressed(cls, m, n, t) -> "ModuleOperator":
        """``q t p`` as an operator ``M -> N``, whatever ``t`` was."""
        return cls(m, n, n.projection @ t @ m.projection)

    @classmethod
    def zero(cls, m, n) -> "ModuleOperator":
        return cls(m, n, AlgebraMatrix.zeros(m.algebra, n.ambient_rank, m.ambient_rank))

    @property
    def algebra(self) -> Algebra:
        return self.domain.algebra

    def adjoint(self) -> "ModuleOperator":
        return ModuleOperator(self.codomain, self.domain, self.matrix.H)

    @property
    def H(self):
        return self.adjoint()

    def __matmul__(self, other: "ModuleOperator") -> "ModuleOperator":
        return compose(self, other)

    def __add__(self, other):
        _check_same_spaces(self, other)
        return ModuleOperator(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other):
        _check_same_spaces(self, other)
        return ModuleOperator(self.domain, self.codomain, self.matrix - other.matrix)

    def __rmul__(self, scalar):
        return ModuleOperator(self.domain, self.codomain, scalar * self.matrix)

    def __call__(self, v: ModuleElement) -> ModuleElement:
        return ModuleElement(self.codomain, self.matrix @ v.vector)

    def norm(self) -> float:
        return self.matrix.norm()

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(),
                "matrix": self.matrix.to_json()}


def _check_same_spaces(a, b):
    if not (a.domain.same_as(b.domain) and a.codomain.same_as(b.codomain)):
        raise InvalidInputError("operators between different modules")


def compose(t2: ModuleOperator, t1: ModuleOperator) -> ModuleOperator:
    """``t2 t1``, first ``t1: M -> N`` then ``t2: N -> P``."""
    if not (t1.codomain is t2.domain or t1.codomain.same_as(t2.domain)):
        raise InvalidInputError("codomain of the first operator is not the domain of the second")
    return ModuleOperator(t1.domain, t2.codomain, t2.matrix @ t1.matrix)


def dsum(*ops: ModuleOperator) -> ModuleOperator:
    """``T_1 + T_2 + ...`` acting diagonally on the direct sums."""
    dom, cod = ops[0].domain, ops[0].codomain
    for op in ops[1:]:
        dom, cod = direct_sum(dom, op.domain), direct_sum(cod, op.codomain)
    return ModuleOperator(dom, cod, _mat_dsum(*[op.matrix for op in ops]))


def omega(mu, module: HilbertModule | None = None) -> ModuleOperator:
    """``Omega_mu: A^n -> M``, ``(a_i) -> sum_i mu_i a_i``.

    Its adjoint is ``xi -> (<mu_i, xi>)_i``.  ``module`` is needed only
    when ``mu`` is empty.
    """
    mu = list(mu)
    if not mu:
        if module is None:
            raise InvalidInputError("module is required for an empty tuple")
        return ModuleOperator.zero(HilbertModule.free(module.algebra, 0), module)
    m = mu[0].parent
    if any(not (x.parent is m or x.parent.same_as(m)) for x in mu):
        raise InvalidInputError("all elements must lie in one module")
    t = block_matrix([[x.vector for x in mu]])
    return ModuleOperator(HilbertModule.free(m.algebra, len(mu)), m, t)


def construct_isomorphism(m: HilbertModule, n: HilbertModule, tol=mc.DEFAULT_TOL):
    """A unitary ``U: M -> N`` when ``rank(M) = rank(N)``, else ``None``."""
    if m.algebra != n.algebra:
        raise InvalidInputError("modules over different algebras")
    try:
        v = mv_partial_isometry(m.projection, n.projection, tol)
    except NoEquivalenceError:
        return None
    return ModuleOperator(m, n, v)


@dataclass(frozen=True)
class QuasiStableCheck:
    """Outcome of :func:`check_quasi_stable`; truthy when the check passed."""

    ok: bool
    invertible: bool
    inverse_residual: float
    corner_compact: bool = True
    message: str = ""
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def two_sided_inverse(t: ModuleOperator, tol=mc.DEFAULT_TOL):
    """Pseudo-inverse of ``t`` and the residual of it being a two-sided inverse."""
    s = t.matrix.blockwise(lambda a: mc.pinv(a, tol), t.matrix.cols, t.matrix.rows)
    s = t.domain.projection @ s @ t.codomain.projection
    left = (s @ t.matrix - t.domain.projection).norm() if t.domain.ambient_rank else 0.0
    right = (t.matrix @ s - t.codomain.projection).norm() if t.codomain.ambient_rank else 0.0
    return ModuleOperator(t.codomain, t.domain, s), max(left, right)


def check_quasi_stable(t: ModuleOperator, partition, tol=mc.DEFAULT_TOL) -> QuasiStableCheck:
    """Check that ``T: M + X -> N + X`` is a quasi-stable isomorphism.

    ``partition`` is ``(M, N, X)``.  In finite dimensions ``I_X - T_XX`` is
    always compact, so the check reduces to the shapes matching and ``T``
    being invertible.
    """
    m, n, x = partition
    if not t.domain.same_as(direct_sum(m, x)) or not t.codomain.same_as(direct_sum(n, x)):
        return QuasiStableCheck(False, False, float("inf"),
                                message="domain/codomain do not match M+X -> N+X")
    _, resid = two_sided_inverse(t, tol)
    scale = max(1.0, t.norm())
    invertible = resid <= 1e3 * tol * scale
    if not invertible:
        log.info("quasi-stable check: operator not invertible (residual %.3e)", resid)
        return QuasiStableCheck(False, False, resid, message="operator is not invertible")
    nm, nx = m.ambient_rank, x.ambient_rank
    corner = t.matrix.submatrix(range(n.ambient_rank, n.ambient_rank + nx), range(nm, nm + nx))
    return QuasiStableCheck(True, True, resid, details={"corner_norm": corner.norm()})

"""Fredholm operators between projective Hilbert modules and their index.

Every operator between finitely generated projective modules over a
finite-dimensional algebra is regular and Fredholm; the functions below
still produce the witnesses (pseudo-inverse, kernel and cokernel
projections, compact remainders) explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrix_core as mc
from .algebra import (AlgebraMatrix, K0Class, Unitization, block_matrix,
                      k0_of_projection, mv_partial_isometry, unitize)
from .errors import InvalidInputError, NumericalDegeneracyError
from .hilbert import (HilbertModule, ModuleElement, ModuleOperator, compose,
                      direct_sum, dsum, module_rank, omega, two_sided_inverse)

__all__ = [
    "ModuleOperator", "IndexWitness", "compose", "adjoint", "dsum", "pseudo_inverse",
    "index", "is_fredholm", "kernel_factorization", "regularize", "regularize_unitized",
    "standard_index_op", "same_index_witness", "fredholm_equivalent", "lift_operator",
    "perturbation_radius",
]

# singular values strictly inside this band (relative to tol * sigma_max) are
# too close to the cutoff to decide whether they belong to the kernel
_GUARD_LOW, _GUARD_HIGH = 1e-3, 1e3


def adjoint(t: ModuleOperator) -> ModuleOperator:
    return t.adjoint()


@dataclass(frozen=True, eq=False)
class IndexWitness:
    operator: ModuleOperator
    pseudo_inverse: ModuleOperator
    kernel_projection: AlgebraMatrix
    cokernel_projection: AlgebraMatrix
    index: K0Class

    def residuals(self) -> dict:
        t, s = self.operator.matrix, self.pseudo_inverse.matrix
        kp, cp = self.kernel_projection, self.cokernel_projection
        return {
            "tst": (t @ s @ t - t).norm() if t.rows and t.cols else 0.0,
            "sts": (s @ t @ s - s).norm() if t.rows and t.cols else 0.0,
            "kernel": kp.projection_residual() if kp.rows else 0.0,
            "cokernel": cp.projection_residual() if cp.rows else 0.0,
        }


def _guarded_pinv(amb, tol):
    s = mc.singular_values(amb)
    if s.size and s[0] > 0:
        rel = s / s[0]
        bad = (rel > tol * _GUARD_LOW) & (rel < tol * _GUARD_HIGH)
        if np.any(bad):
            raise NumericalDegeneracyError(
                f"singular value {float(rel[bad][0]):.3e} (relative) is too close to the kernel cutoff {tol:.1e}")
    return mc.pinv(amb, tol)


def pseudo_inverse(t: ModuleOperator, tol=mc.DEFAULT_TOL) -> IndexWitness:
    """Moore-Penrose pseudo-inverse ``S`` of ``T`` with kernel data.

    ``S`` is computed on the represented complex matrix and pulled back into
    matrices over the algebra; failure to pull back means the input was not
    a genuine operator over the algebra.
    """
    alg = t.algebra
    m, n = t.domain, t.codomain
    p, q = m.projection, n.projection
    if t.matrix.rows == 0 or t.matrix.cols == 0:
        s = AlgebraMatrix.zeros(alg, m.ambient_rank, n.ambient_rank)
    else:
        amb = _guarded_pinv(t.matrix.to_ambient(), tol)
        try:
            s = AlgebraMatrix.from_ambient(alg, amb, m.ambient_rank, n.ambient_rank, max(tol, 1e-9))
        except InvalidInputError as exc:
            raise NumericalDegeneracyError(f"pseudo-inverse left the algebra: {exc}") from exc
    s = p @ s @ q
    st = s @ t.matrix
    ts = t.matrix @ s
    kp = 0.5 * ((p - st) + (p - st).H)
    cp = 0.5 * ((q - ts) + (q - ts).H)
    ind = _class(kp, alg) - _class(cp, alg)
    expected = module_rank(m) - module_rank(n)
    if ind != expected:
        raise NumericalDegeneracyError(f"kernel-cokernel index {ind} disagrees with rank difference {expected}")
    return IndexWitness(t, ModuleOperator(n, m, s), kp, cp, ind)


def _class(p: AlgebraMatrix, alg) -> K0Class:
    if p.rows == 0:
        return K0Class(alg, (0,) * alg.k)
    return k0_of_projection(p, 1e-7)


def index(t: ModuleOperator, tol=mc.DEFAULT_TOL) -> K0Class:
    """``rank(Ker T) - rank(Ker T*)`` in ``K_0(A)``."""
    return pseudo_inverse(t, tol).index


def is_fredholm(t: ModuleOperator, tol=mc.DEFAULT_TOL):
    """Always true here; returns ``(True, S)`` with ``I - ST`` and ``I - TS`` compact."""
    return True, pseudo_inverse(t, tol).pseudo_inverse


def perturbation_radius(t: ModuleOperator, tol=mc.DEFAULT_TOL) -> float:
    """``1 / ||S||``: perturbations smaller than this keep the index."""
    s = pseudo_inverse(t, tol).pseudo_inverse.norm()
    return float("inf") if s == 0 else 1.0 / s


def kernel_factorization(w: IndexWitness):
    """Tuples ``mu = nu`` in ``M`` with ``I - ST = Omega_nu Omega_mu*``.

    The columns of the kernel projection ``K`` work because ``K = K K*``.
    """
    m = w.operator.domain
    k = w.kernel_projection
    cols = [ModuleElement(m, k.column(c)) for c in range(k.cols)]
    return cols, cols


def regularize(t: ModuleOperator, s: ModuleOperator, mu, nu, tol=mc.DEFAULT_TOL):
    """Lift ``T`` to a regular ``T~ = [[T, 0], [Omega_mu*, 0]]`` on ``M + A^n``.

    ``mu`` and ``nu`` must factor ``I_M - S T = Omega_nu Omega_mu*``.
    Returns ``(T~, S~)`` with ``S~ = [[S, Omega_nu], [0, 0]]``.
    """
    m, n_mod = t.domain, t.codomain
    alg = t.algebra
    mu, nu = list(mu), list(nu)
    if len(mu) != len(nu):
        raise InvalidInputError("mu and nu must have the same length")
    n = len(mu)
    om_mu, om_nu = omega(mu, m), omega(nu, m)
    lhs = m.projection - s.matrix @ t.matrix
    fact = om_nu.matrix @ om_mu.matrix.H if n else AlgebraMatrix.zeros(alg, m.ambient_rank, m.ambient_rank)
    resid = (lhs - fact).norm() if m.ambient_rank else 0.0
    if resid > 1e3 * tol * max(1.0, t.norm(), s.norm()):
        raise InvalidInputError(f"I - ST is not Omega_nu Omega_mu* (residual {resid:.3e})")
    free = HilbertModule.free(alg, n)
    dom, cod = direct_sum(m, free), direct_sum(n_mod, free)
    z = AlgebraMatrix.zeros
    tt = block_matrix([[t.matrix, z(alg, n_mod.ambient_rank, n)],
                       [om_mu.matrix.H, z(alg, n, n)]])
    st = block_matrix([[s.matrix, om_nu.matrix],
                       [z(alg, n, n_mod.ambient_rank), z(alg, n, n)]])
    t_reg, s_reg = ModuleOperator(dom, cod, tt), ModuleOperator(cod, dom, st)
    r1 = (tt @ st @ tt - tt).norm()
    r2 = (st @ tt @ st - st).norm()
    if max(r1, r2) > 1e3 * tol * max(1.0, tt.norm(), st.norm()) ** 3:
        raise NumericalDegeneracyError(f"regularized pair is not mutually pseudo-inverse ({r1:.3e}, {r2:.3e})")
    return t_reg, s_reg


def lift_operator(t: ModuleOperator, u: Unitization) -> ModuleOperator:
    """View ``T`` over ``A -> A~``."""
    alg = u.unitized
    m = HilbertModule(alg, u.embed(t.domain.projection))
    n = HilbertModule(alg, u.embed(t.codomain.projection))
    return ModuleOperator(m, n, u.embed(t.matrix))


@dataclass(frozen=True, eq=False)
class Regularization:
    unitization: Unitization
    lifted: ModuleOperator
    regular: ModuleOperator
    regular_inverse: ModuleOperator
    n: int


def regularize_unitized(t: ModuleOperator, tol=mc.DEFAULT_TOL) -> Regularization:
    """Lift ``T`` to the unitization and regularize it there."""
    u = unitize(t.algebra)
    lt = lift_operator(t, u)
    w = pseudo_inverse(lt, tol)
    mu, nu = kernel_factorization(w)
    tr, sr = regularize(lt, w.pseudo_inverse, mu, nu, tol)
    return Regularization(u, lt, tr, sr, len(mu))


def standard_index_op(p: AlgebraMatrix, q: AlgebraMatrix) -> ModuleOperator:
    """``T: p A^n -> q A^n``, ``v -> q v``; its index is ``[p] - [q]``."""
    if p.parent != q.parent or p.shape != q.shape:
        raise InvalidInputError("p and q must be same-size matrices over one algebra")
    m, n = HilbertModule(p.parent, p), HilbertModule(q.parent, q)
    return ModuleOperator(m, n, q @ p)


@dataclass(frozen=True, eq=False)
class SameIndexWitness:
    n: int
    unitary: ModuleOperator
    compact: ModuleOperator
    target: ModuleOperator


def _polar_part(t: AlgebraMatrix, tol):
    def part(a):
        if a.size == 0:
            return np.zeros_like(a)
        u, s, vh = np.linalg.svd(a, full_matrices=False)
        if s[0] == 0:
            return np.zeros_like(a)
        keep = s > tol * s[0]
        return u[:, keep] @ vh[keep]
    return t.blockwise(part, t.rows, t.cols)


def same_index_witness(t1: ModuleOperator, t2: ModuleOperator, tol=mc.DEFAULT_TOL):
    """Invertible ``U`` with ``T_1 + T_2* + I_{A^n} - U`` compact, or ``None``.

    ``U`` is the polar part of ``T_1 + T_2*`` completed by a partial
    isometry from its kernel onto its cokernel; ``n = 0`` always suffices
    over a finite-dimensional algebra.
    """
    if t1.algebra != t2.algebra:
        raise InvalidInputError("operators over different algebras")
    if index(t1, tol) != index(t2, tol):
        return None
    big = dsum(t1, t2.adjoint())
    m, n = big.domain, big.codomain
    v = _polar_part(big.matrix, tol)
    ker = m.projection - v.H @ v
    coker = n.projection - v @ v.H
    ker, coker = 0.5 * (ker + ker.H), 0.5 * (coker + coker.H)
    w = mv_partial_isometry(ker, coker, 1e-7) if m.ambient_rank and n.ambient_rank else v
    u = ModuleOperator(m, n, v + w) if m.ambient_rank and n.ambient_rank else ModuleOperator(m, n, v)
    _, resid = two_sided_inverse(u, tol)
    if resid > 1e-8:
        raise NumericalDegeneracyError(f"witness is not invertible (residual {resid:.3e})")
    return SameIndexWitness(0, u, big - u, big)


def fredholm_equivalent(t1: ModuleOperator, t2: ModuleOperator, tol=mc.DEFAULT_TOL) -> bool:
    """Equality of indices, i.e. equality of classes in the Fredholm picture of K0."""
    return index(t1, tol) == index(t2, tol)

"""Dense complex-matrix kernel.

Everything here works on plain ``numpy`` complex arrays.  Tolerances are
relative to the largest singular value of the matrix under consideration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

DEFAULT_TOL = 1e-8


def as_cmatrix(t) -> np.ndarray:
    """Return ``t`` as a 2-d complex array, rejecting NaN/Inf entries."""
    a = np.asarray(t, dtype=complex)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def adjoint(t) -> np.ndarray:
    return np.conj(np.asarray(t)).T


def _check_tol(tol):
    if not tol > 0:
        raise InvalidInputError(f"tolerance must be positive, got {tol}")


def singular_values(t) -> np.ndarray:
    t = as_cmatrix(t)
    if t.size == 0:
        return np.zeros(0)
    return np.linalg.svd(t, compute_uv=False)


def rank_tol(t, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol * sigma_max``."""
    _check_tol(tol)
    s = singular_values(t)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def pinv(t, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with a relative singular-value cutoff.

    Singular values at or below ``tol * sigma_max`` are treated as zero, so
    ``t @ s @ t == t`` and ``s @ t @ s == s`` hold to working precision and
    both ``t @ s`` and ``s @ t`` are orthogonal projections.
    """
    _check_tol(tol)
    t = as_cmatrix(t)
    m, n = t.shape
    if t.size == 0:
        return np.zeros((n, m), dtype=complex)
    u, s, vh = np.linalg.svd(t, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, m), dtype=complex)
    keep = s > tol * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (adjoint(vh) * inv) @ adjoint(u)


def range_basis(t, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the range of ``t``."""
    t = as_cmatrix(t)
    if t.size == 0:
        return np.zeros((t.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(t, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((t.shape[0], 0), dtype=complex)
    return u[:, s > tol * s[0]]


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ``(i*rb + k, j*cb + l)`` is ``a[i, j] * b[k, l]``."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def trace_inner(a, b) -> complex:
    """The trace inner product ``trace(a* b)``."""
    return complex(np.vdot(np.asarray(a).ravel(), np.asarray(b).ravel()))


def is_self_adjoint_idempotent(p, tol: float = 1e-8) -> bool:
    p = np.asarray(p)
    scale = max(1.0, float(np.linalg.norm(p, 2))) if p.size else 1.0
    return (np.linalg.norm(p - adjoint(p)) <= tol * scale
            and np.linalg.norm(p @ p - p) <= tol * scale)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of ``rows x cols`` matrices.

    ``basis`` has shape ``(dim, rows, cols)`` and is orthonormal for the
    trace inner product.
    """

    shape: tuple
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def flat(self) -> np.ndarray:
        """Basis as a ``(dim, rows*cols)`` array."""
        return self.basis.reshape(self.dim, int(np.prod(self.shape)))

    def coordinates(self, m) -> np.ndarray:
        """Coefficients of the orthogonal projection of ``m`` on the basis."""
        return np.conj(self.flat()) @ np.asarray(m, dtype=complex).ravel()

    def project(self, m) -> np.ndarray:
        c = self.coordinates(m)
        return (c @ self.flat()).reshape(self.shape)

    def residual(self, m) -> float:
        """Frobenius distance from ``m`` to the subspace."""
        m = np.asarray(m, dtype=complex)
        return float(np.linalg.norm(m - self.project(m)))

    def contains(self, m, tol: float = DEFAULT_TOL) -> bool:
        m = np.asarray(m, dtype=complex)
        return self.residual(m) <= tol * max(1.0, float(np.linalg.norm(m)))

    def element(self, coeffs) -> np.ndarray:
        return (np.asarray(coeffs, dtype=complex) @ self.flat()).reshape(self.shape)

    def gram_error(self) -> float:
        f = self.flat()
        return float(np.linalg.norm(np.conj(f) @ f.T - np.eye(self.dim)))


def zero_subspace(shape) -> Subspace:
    shape = tuple(int(s) for s in shape)
    return Subspace(shape, np.zeros((0,) + shape, dtype=complex))


def onb_span(vectors, tol: float = DEFAULT_TOL, shape=None, scale: float = 0.0) -> Subspace:
    """Orthonormal basis of the span of a list of equally shaped matrices.

    An empty list yields the zero subspace of ``shape``.  Directions whose
    singular value falls at or below ``tol * max(sigma_max, scale)`` are
    discarded; a positive ``scale`` keeps a set of pure rounding noise (for
    example compressions of unit vectors by orthogonal projections) from
    being mistaken for a nonzero span.
    """
    _check_tol(tol)
    vectors = [as_cmatrix(v) for v in vectors]
    if not vectors:
        if shape is None:
            raise InvalidInputError("shape is required for an empty spanning set")
        return zero_subspace(shape)
    vshape = vectors[0].shape
    if shape is not None and tuple(shape) != vshape:
        raise InvalidInputError(f"vectors have shape {vshape}, expected {tuple(shape)}")
    if any(v.shape != vshape for v in vectors):
        raise InvalidInputError("all spanning matrices must share one shape")
    stacked = np.stack([v.ravel() for v in vectors])
    if stacked.shape[1] == 0:
        return zero_subspace(vshape)
    _, s, vh = np.linalg.svd(stacked, full_matrices=False)
    if s[0] == 0.0:
        return zero_subspace(vshape)
    r = int(np.sum(s > tol * max(s[0], scale)))
    # each input row is a combination of the rows of vh
    basis = vh[:r].reshape((r,) + vshape)
    return Subspace(vshape, basis)


def subspace_equal(u: Subspace, v: Subspace, tol: float = DEFAULT_TOL) -> bool:
    """Mutual containment of two subspaces of the same ambient shape."""
    if tuple(u.shape) != tuple(v.shape):
        raise InvalidInputError(f"ambient mismatch {u.shape} vs {v.shape}")
    if u.dim != v.dim:
        return False
    return (all(v.residual(b) <= tol for b in u.basis)
            and all(u.residual(b) <= tol for b in v.basis))


def subspace_sum(u: Subspace, v: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    return onb_span(list(u.basis) + list(v.basis), tol, shape=u.shape)

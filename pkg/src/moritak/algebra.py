"""Finite-dimensional C*-algebras in standard form.

An algebra ``A = M_{n_1} + ... + M_{n_k}`` is represented faithfully on
``C^d`` with ``d = sum(n_i * mu_i)``: block ``i`` is repeated ``mu_i`` times
along the diagonal, blocks in order.  Matrices over ``A`` are stored in
reduced form, one complex matrix per block: an ``m x n`` matrix over ``A``
becomes, for block ``i``, an ``(m*n_i) x (n*n_i)`` complex matrix whose
``(r, c)`` sub-block is the block-``i`` part of entry ``(r, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matrix_core as mc
from .errors import (InvalidInputError, NoEquivalenceError,
                     NumericalDegeneracyError)

TRACE_GUARD = 1e-6


@dataclass(frozen=True)
class Algebra:
    """``M_{n_1} + ... + M_{n_k}`` with block ``i`` represented ``mu_i`` times."""

    block_sizes: tuple
    multiplicities: tuple

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        mults = tuple(int(m) for m in self.multiplicities)
        if not sizes or len(sizes) != len(mults):
            raise InvalidInputError("block sizes and multiplicities must be nonempty and of equal length")
        if min(sizes) < 1 or min(mults) < 1:
            raise InvalidInputError("block sizes and multiplicities must be positive")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "multiplicities", mults)

    @property
    def k(self) -> int:
        return len(self.block_sizes)

    @property
    def ambient_dim(self) -> int:
        return sum(n * m for n, m in zip(self.block_sizes, self.multiplicities))

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra itself."""
        return sum(n * n for n in self.block_sizes)

    @cached_property
    def offsets(self) -> tuple:
        out, pos = [], 0
        for n, m in zip(self.block_sizes, self.multiplicities):
            out.append(pos)
            pos += n * m
        return tuple(out)

    def copy_slices(self, i):
        """Ambient index ranges of the ``mu_i`` copies of block ``i``."""
        n, off = self.block_sizes[i], self.offsets[i]
        return [slice(off + c * n, off + (c + 1) * n) for c in range(self.multiplicities[i])]

    def embed(self, x) -> np.ndarray:
        """Ambient matrix of an element (or a matrix over the algebra)."""
        if isinstance(x, AlgebraElement):
            x = AlgebraMatrix(self, 1, 1, tuple(x.blocks))
        return x.to_ambient()

    def extract(self, m, tol=mc.DEFAULT_TOL) -> "AlgebraElement":
        ok, x = is_member(m, self, tol)
        if not ok:
            raise InvalidInputError("matrix is not in the represented algebra")
        return x

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.asarray(b, dtype=complex) for b in blocks))

    def one(self) -> "AlgebraElement":
        return self.element([np.eye(n) for n in self.block_sizes])

    def zero(self) -> "AlgebraElement":
        return self.element([np.zeros((n, n)) for n in self.block_sizes])

    def matrix_unit(self, i, r, c) -> "AlgebraElement":
        blocks = [np.zeros((n, n), dtype=complex) for n in self.block_sizes]
        blocks[i][r, c] = 1.0
        return self.element(blocks)

    def basis(self):
        """Matrix units ``e^{(i)}_{rc}`` of every block."""
        return [self.matrix_unit(i, r, c)
                for i, n in enumerate(self.block_sizes)
                for r in range(n) for c in range(n)]

    def unit_class(self) -> "K0Class":
        return K0Class(self, self.block_sizes)

    def to_json(self) -> dict:
        return {"blocks": list(self.block_sizes), "multiplicities": list(self.multiplicities)}


def make_algebra(block_sizes, multiplicities=None) -> Algebra:
    if multiplicities is None:
        multiplicities = [1] * len(block_sizes)
    return Algebra(tuple(block_sizes), tuple(multiplicities))


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    parent: Algebra
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != self.parent.k:
            raise InvalidInputError("wrong number of blocks")
        for b, n in zip(self.blocks, self.parent.block_sizes):
            if np.shape(b) != (n, n):
                raise InvalidInputError(f"block of shape {np.shape(b)} where ({n}, {n}) expected")

    def _wrap(self, blocks):
        return AlgebraElement(self.parent, tuple(blocks))

    def __add__(self, other):
        return self._wrap(a + b for a, b in zip(self.blocks, other.blocks))

    def __sub__(self, other):
        return self._wrap(a - b for a, b in zip(self.blocks, other.blocks))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self._wrap(a @ b for a, b in zip(self.blocks, other.blocks))
        return self._wrap(a * other for a in self.blocks)

    __matmul__ = __mul__

    def __rmul__(self, scalar):
        return self._wrap(a * scalar for a in self.blocks)

    def adjoint(self):
        return self._wrap(mc.adjoint(a) for a in self.blocks)

    def norm(self) -> float:
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def ambient(self) -> np.ndarray:
        return self.parent.embed(self)

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part (PSD test)."""
        return min(float(np.linalg.eigvalsh((b + mc.adjoint(b)) / 2).min()) for b in self.blocks)

    def allclose(self, other, tol=1e-9) -> bool:
        return all(np.linalg.norm(a - b) <= tol for a, b in zip(self.blocks, other.blocks))


@dataclass(frozen=True, eq=False)
class AlgebraMatrix:
    """An ``rows x cols`` matrix over ``parent`` in reduced (per-block) form."""

    parent: Algebra
    rows: int
    cols: int
    reduced: tuple

    def __post_init__(self):
        if len(self.reduced) != self.parent.k:
            raise InvalidInputError("wrong number of reduced blocks")
        for r, n in zip(self.reduced, self.parent.block_sizes):
            if np.shape(r) != (self.rows * n, self.cols * n):
                raise InvalidInputError(
                    f"reduced block of shape {np.shape(r)} where "
                    f"({self.rows * n}, {self.cols * n}) expected")
            if not np.all(np.isfinite(r)):
                raise InvalidInputError("non-finite entries")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, alg: Algebra, entries) -> "AlgebraMatrix":
        """Build from a grid of :class:`AlgebraElement` or per-block lists."""
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        reduced = []
        for i, n in enumerate(alg.block_sizes):
            red = np.zeros((rows * n, cols * n), dtype=complex)
            for r, row in enumerate(entries):
                if len(row) != cols:
                    raise InvalidInputError("ragged entry grid")
                for c, x in enumerate(row):
                    blk = x.blocks[i] if isinstance(x, AlgebraElement) else x[i]
                    red[r * n:(r + 1) * n, c * n:(c + 1) * n] = blk
            reduced.append(red)
        return cls(alg, rows, cols, tuple(reduced))

    @classmethod
    def zeros(cls, alg, rows, cols):
        return cls(alg, rows, cols, tuple(np.zeros((rows * n, cols * n), dtype=complex)
                                          for n in alg.block_sizes))

    @classmethod
    def identity(cls, alg, n):
        return cls(alg, n, n, tuple(np.eye(n * s, dtype=complex) for s in alg.block_sizes))

    @classmethod
    def scalar(cls, alg, m) -> "AlgebraMatrix":
        """A complex matrix acting as ``m (x) 1_A``."""
        m = mc.as_cmatrix(m)
        return cls(alg, m.shape[0], m.shape[1],
                   tuple(np.kron(m, np.eye(n)) for n in alg.block_sizes))

    @classmethod
    def from_ambient(cls, alg, m, rows, cols, tol=mc.DEFAULT_TOL) -> "AlgebraMatrix":
        x, resid = _extract(alg, mc.as_cmatrix(m), rows, cols)
        if resid > tol * max(1.0, float(np.linalg.norm(m))):
            raise InvalidInputError(f"matrix is not over the algebra (residual {resid:.3e})")
        return x

    # -- views --------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def entry(self, r, c) -> AlgebraElement:
        blocks = []
        for red, n in zip(self.reduced, self.parent.block_sizes):
            blocks.append(red[r * n:(r + 1) * n, c * n:(c + 1) * n].copy())
        return AlgebraElement(self.parent, tuple(blocks))

    def entries(self):
        return [[self.entry(r, c) for c in range(self.cols)] for r in range(self.rows)]

    def column(self, c) -> "AlgebraMatrix":
        return self.submatrix(range(self.rows), [c])

    def submatrix(self, rows, cols) -> "AlgebraMatrix":
        rows, cols = list(rows), list(cols)
        out = []
        for red, n in zip(self.reduced, self.parent.block_sizes):
            ri = np.concatenate([np.arange(r * n, (r + 1) * n) for r in rows]) if rows else np.zeros(0, int)
            ci = np.concatenate([np.arange(c * n, (c + 1) * n) for c in cols]) if cols else np.zeros(0, int)
            out.append(red[np.ix_(ri, ci)])
        return AlgebraMatrix(self.parent, len(rows), len(cols), tuple(out))

    def to_ambient(self) -> np.ndarray:
        alg = self.parent
        d = alg.ambient_dim
        amb = np.zeros((self.rows, d, self.cols, d), dtype=complex)
        for i, red in enumerate(self.reduced):
            n = alg.block_sizes[i]
            r4 = red.reshape(self.rows, n, self.cols, n)
            for sl in alg.copy_slices(i):
                amb[:, sl, :, sl] = r4
        return amb.reshape(self.rows * d, self.cols * d)

    # -- arithmetic ---------------------------------------------------------

    def _check_same(self, other):
        if other.parent != self.parent:
            raise InvalidInputError("matrices over different algebras")

    def _wrap(self, rows, cols, reduced):
        return AlgebraMatrix(self.parent, rows, cols, tuple(reduced))

    def __add__(self, other):
        self._check_same(other)
        if other.shape != self.shape:
            raise InvalidInputError(f"shape mismatch {self.shape} vs {other.shape}")
        return self._wrap(self.rows, self.cols, (a + b for a, b in zip(self.reduced, other.reduced)))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __rmul__(self, scalar):
        return self._wrap(self.rows, self.cols, (scalar * a for a in self.reduced))

    def __matmul__(self, other):
        self._check_same(other)
        if self.cols != other.rows:
            raise InvalidInputError(f"cannot multiply {self.shape} by {other.shape}")
        return self._wrap(self.rows, other.cols, (a @ b for a, b in zip(self.reduced, other.reduced)))

    def right_mul(self, a: AlgebraElement) -> "AlgebraMatrix":
        """Multiply every entry on the right by ``a``."""
        return self @ AlgebraMatrix.from_entries(
            self.parent, [[a if r == c else self.parent.zero() for c in range(self.cols)]
                          for r in range(self.cols)])

    def adjoint(self) -> "AlgebraMatrix":
        return self._wrap(self.cols, self.rows, (mc.adjoint(a) for a in self.reduced))

    @property
    def H(self):
        return self.adjoint()

    def blockwise(self, fn, rows=None, cols=None) -> "AlgebraMatrix":
        """Apply a complex-matrix function to every reduced block."""
        out = [fn(a) for a in self.reduced]
        if rows is None:
            n0 = self.parent.block_sizes[0]
            rows, cols = out[0].shape[0] // n0, out[0].shape[1] // n0
        return self._wrap(rows, cols, out)

    def norm(self) -> float:
        """C*-norm: the largest spectral norm over the blocks."""
        return max((float(np.linalg.norm(a, 2)) if a.size else 0.0) for a in self.reduced)

    def fro(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(a) ** 2 for a in self.reduced)))

    def allclose(self, other, tol=1e-9) -> bool:
        return self.shape == other.shape and (self - other).norm() <= tol

    def is_projection(self, tol=mc.DEFAULT_TOL) -> bool:
        return self.rows == self.cols and all(
            mc.is_self_adjoint_idempotent(a, tol) for a in self.reduced)

    def projection_residual(self) -> float:
        return max((float(np.linalg.norm(a @ a - a)) + float(np.linalg.norm(a - mc.adjoint(a))))
                   if a.size else 0.0 for a in self.reduced)

    def inverse(self) -> "AlgebraMatrix":
        if self.rows != self.cols:
            raise InvalidInputError("only square matrices can be inverted")
        try:
            return self.blockwise(np.linalg.inv, self.rows, self.cols)
        except np.linalg.LinAlgError as exc:
            raise NumericalDegeneracyError("matrix is singular") from exc

    def to_json(self) -> dict:
        ents = [[[_cm_to_json(b) for b in self.entry(r, c).blocks] for c in range(self.cols)]
                for r in range(self.rows)]
        return {"rows": self.rows, "cols": self.cols, "entries": ents}


def _cm_to_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def dsum(*mats: AlgebraMatrix) -> AlgebraMatrix:
    """Block-diagonal direct sum of matrices over one algebra."""
    alg = mats[0].parent
    if any(m.parent != alg for m in mats):
        raise InvalidInputError("direct sum over different algebras")
    out = []
    for i in range(alg.k):
        blocks = [m.reduced[i] for m in mats]
        r = sum(b.shape[0] for b in blocks)
        c = sum(b.shape[1] for b in blocks)
        big = np.zeros((r, c), dtype=complex)
        pr = pc = 0
        for b in blocks:
            big[pr:pr + b.shape[0], pc:pc + b.shape[1]] = b
            pr += b.shape[0]
            pc += b.shape[1]
        out.append(big)
    return AlgebraMatrix(alg, sum(m.rows for m in mats), sum(m.cols for m in mats), tuple(out))


def block_matrix(grid) -> AlgebraMatrix:
    """Assemble a matrix over the algebra from a grid of compatible pieces."""
    alg = grid[0][0].parent
    rows = sum(row[0].rows for row in grid)
    cols = sum(m.cols for m in grid[0])
    out = []
    for i in range(alg.k):
        out.append(np.block([[m.reduced[i] for m in row] for row in grid]))
    return AlgebraMatrix(alg, rows, cols, tuple(out))


def _extract(alg: Algebra, m, rows, cols):
    d = alg.ambient_dim
    if m.shape != (rows * d, cols * d):
        raise InvalidInputError(f"ambient matrix has shape {m.shape}, expected {(rows * d, cols * d)}")
    m4 = m.reshape(rows, d, cols, d)
    reduced = []
    for i, n in enumerate(alg.block_sizes):
        acc = sum(m4[:, sl, :, sl] for sl in alg.copy_slices(i)) / alg.multiplicities[i]
        reduced.append(acc.reshape(rows * n, cols * n))
    x = AlgebraMatrix(alg, rows, cols, tuple(reduced))
    resid = float(np.linalg.norm(m - x.to_ambient()))
    return x, resid


def is_member(m, alg: Algebra, tol=mc.DEFAULT_TOL):
    """Whether a ``d x d`` matrix lies in the represented algebra.

    Returns ``(True, element)`` on success and ``(False, None)`` otherwise.
    """
    m = mc.as_cmatrix(m)
    d = alg.ambient_dim
    if m.shape != (d, d):
        raise InvalidInputError(f"expected a {d}x{d} matrix, got {m.shape}")
    x, resid = _extract(alg, m, 1, 1)
    if resid <= tol * max(1.0, float(np.linalg.norm(m))):
        return True, x.entry(0, 0)
    return False, None


@dataclass(frozen=True)
class K0Class:
    """An element of ``K_0(A) = Z^k``."""

    parent: Algebra
    vector: tuple

    def __post_init__(self):
        v = tuple(int(x) for x in self.vector)
        if len(v) != self.parent.k:
            raise InvalidInputError(f"K0 vector of length {len(v)} for an algebra with {self.parent.k} blocks")
        object.__setattr__(self, "vector", v)

    def _check(self, other):
        if other.parent != self.parent:
            raise InvalidInputError("K0 classes over different algebras")

    def __add__(self, other):
        self._check(other)
        return K0Class(self.parent, tuple(a + b for a, b in zip(self.vector, other.vector)))

    def __sub__(self, other):
        self._check(other)
        return K0Class(self.parent, tuple(a - b for a, b in zip(self.vector, other.vector)))

    def __neg__(self):
        return K0Class(self.parent, tuple(-a for a in self.vector))

    def __mul__(self, n: int):
        return K0Class(self.parent, tuple(n * a for a in self.vector))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.vector)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.vector) + ")"


def zero_class(alg) -> K0Class:
    return K0Class(alg, (0,) * alg.k)


def block_ranks(p: AlgebraMatrix, guard=TRACE_GUARD) -> tuple:
    """Rounded traces of the reduced blocks of a projection."""
    out = []
    for a in p.reduced:
        t = float(np.trace(a).real) if a.size else 0.0
        r = round(t)
        if abs(t - r) >= guard:
            raise NumericalDegeneracyError(f"projection trace {t!r} is not within {guard} of an integer")
        out.append(int(r))
    return tuple(out)


def k0_of_projection(p: AlgebraMatrix, tol=mc.DEFAULT_TOL) -> K0Class:
    """K0 class ``[p]_0`` of a projection, one complex rank per block."""
    if p.rows != p.cols:
        raise InvalidInputError("a projection must be square")
    if not p.is_projection(tol):
        raise InvalidInputError(f"not a projection (residual {p.projection_residual():.3e})")
    return K0Class(p.parent, block_ranks(p))


def minimal_projection(alg: Algebra, i: int) -> AlgebraMatrix:
    """``e_11`` of block ``i`` (0-based) as a 1x1 matrix over the algebra."""
    if not 0 <= i < alg.k:
        raise InvalidInputError(f"block index {i} out of range 0..{alg.k - 1}")
    return AlgebraMatrix.from_entries(alg, [[alg.matrix_unit(i, 0, 0)]])


def _canonical_range(a, rank):
    """The top ``rank`` left singular vectors, each with its largest entry real positive."""
    if rank == 0 or a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u = np.linalg.svd(a)[0][:, :rank].copy()
    for j in range(u.shape[1]):
        idx = int(np.argmax(np.abs(u[:, j])))
        u[:, j] *= np.conj(u[idx, j]) / abs(u[idx, j])
    return u


def mv_partial_isometry(p: AlgebraMatrix, q: AlgebraMatrix, tol=mc.DEFAULT_TOL) -> AlgebraMatrix:
    """A partial isometry ``v`` with ``v* v = p`` and ``v v* = q``.

    Built block by block by matching orthonormal range bases.  Raises
    :class:`NoEquivalenceError` when the K0 classes differ.
    """
    if p.parent != q.parent:
        raise InvalidInputError("projections over different algebras")
    cp, cq = k0_of_projection(p, tol), k0_of_projection(q, tol)
    if cp != cq:
        raise NoEquivalenceError(f"[p] = {cp} differs from [q] = {cq}")
    out = []
    for a, b, r in zip(p.reduced, q.reduced, cp.vector):
        up, uq = _canonical_range(a, r), _canonical_range(b, r)
        out.append(uq @ mc.adjoint(up))
    return AlgebraMatrix(p.parent, q.rows, p.cols, tuple(out))


def idempotent_to_projection(e: AlgebraMatrix, tol=mc.DEFAULT_TOL):
    """Self-adjoint projection ``r`` and invertible ``z`` with ``r = z e z^-1``.

    ``r = e e* (1 + (e - e*)(e* - e))^-1`` is the range projection of ``e``;
    ``z = r e + (1 - r)(1 - e)`` with inverse ``e r + (1 - e)(1 - r)``.
    """
    if e.rows != e.cols:
        raise InvalidInputError("an idempotent must be square")
    scale = max(1.0, e.norm())
    if (e @ e - e).norm() > tol * scale:
        raise InvalidInputError("matrix is not idempotent")
    one = AlgebraMatrix.identity(e.parent, e.rows)
    d = e - e.H
    kap = one + d @ d.H
    cond = max(np.linalg.cond(a) for a in kap.reduced) if e.rows else 1.0
    if not np.isfinite(cond) or cond > 1.0 / tol:
        raise NumericalDegeneracyError(f"similarity is ill-conditioned (cond {cond:.3e})")
    r = e @ e.H @ kap.inverse()
    # symmetrize away rounding
    r = 0.5 * (r + r.H)
    z = r @ e + (one - r) @ (one - e)
    zc = max(np.linalg.cond(a) for a in z.reduced) if e.rows else 1.0
    if not np.isfinite(zc) or zc > 1.0 / tol:
        raise NumericalDegeneracyError(f"similarity is ill-conditioned (cond {zc:.3e})")
    return r, z


@dataclass(frozen=True)
class Unitization:
    """``A~ = A + C 1`` realized as the algebra with an extra 1x1 block."""

    base: Algebra

    @property
    def unitized(self) -> Algebra:
        return Algebra(self.base.block_sizes + (1,), self.base.multiplicities + (1,))

    def embed_element(self, a: AlgebraElement) -> AlgebraElement:
        return self.unitized.element(list(a.blocks) + [np.zeros((1, 1))])

    def embed(self, m: AlgebraMatrix) -> AlgebraMatrix:
        return AlgebraMatrix(self.unitized, m.rows, m.cols,
                             tuple(m.reduced) + (np.zeros((m.rows, m.cols), dtype=complex),))

    def unit(self) -> AlgebraElement:
        return self.unitized.one()

    def augmentation(self, a: AlgebraElement) -> complex:
        """``eps(a + lambda) = lambda``."""
        return complex(a.blocks[-1][0, 0])

    def augmentation_k0(self, c: K0Class) -> int:
        """``eps_*`` on K0: the last coordinate."""
        return int(c.vector[-1])

    def embed_k0(self, c: K0Class) -> K0Class:
        return K0Class(self.unitized, c.vector + (0,))

    def restrict_k0(self, c: K0Class) -> K0Class:
        """Inverse of :meth:`embed_k0` on the kernel of ``eps_*``."""
        if self.augmentation_k0(c) != 0:
            raise InvalidInputError(f"class {c} is not in the kernel of the augmentation")
        return K0Class(self.base, c.vector[:-1])


def unitize(alg: Algebra) -> Unitization:
    return Unitization(alg)

"""Block structure of a concrete finite-dimensional *-algebra of matrices.

Given a spanning set of a *-closed, multiplicatively closed algebra of
``D x D`` matrices, :func:`central_decomposition` finds its minimal central
projections, block sizes and multiplicities, and a unitary ``U`` such that
``U* s U`` is in the standard form used by :class:`~moritak.algebra.Algebra`
for every ``s`` in the algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrix_core as mc
from .algebra import Algebra, AlgebraElement, is_member
from .errors import InvalidInputError, NumericalDegeneracyError

_SEED = 20240521
_TRIES = 4


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Result of :func:`central_decomposition`.

    ``unitary[:, :unit_rank]`` spans the range of the algebra's unit; the
    remaining columns (if any) span its orthogonal complement, where every
    element of the algebra vanishes.
    """

    block_sizes: tuple
    multiplicities: tuple
    unitary: np.ndarray
    unit_rank: int
    central_projections: tuple

    @property
    def algebra(self) -> Algebra:
        return Algebra(self.block_sizes, self.multiplicities)

    @property
    def frame(self) -> np.ndarray:
        """Isometry ``C^d -> C^D`` carrying the standard representation."""
        return self.unitary[:, :self.unit_rank]

    def to_standard(self, s, tol=1e-7) -> AlgebraElement:
        w = self.frame
        ok, x = is_member(mc.adjoint(w) @ s @ w, self.algebra, tol)
        if not ok:
            raise InvalidInputError("matrix is not in the decomposed algebra")
        return x

    def from_standard(self, a: AlgebraElement) -> np.ndarray:
        w = self.frame
        return w @ a.ambient() @ mc.adjoint(w)


def _check_closure(space: mc.Subspace, tol):
    basis = list(space.basis)
    worst = 0.0
    for a in basis:
        worst = max(worst, space.residual(mc.adjoint(a)))
    if worst > tol:
        raise InvalidInputError(f"span is not closed under adjoint (residual {worst:.3e})")
    flat = space.flat()
    for a in basis:
        prods = np.einsum("ij,kjl->kil", a, space.basis).reshape(len(basis), -1)
        coeffs = np.conj(flat) @ prods.T
        resid = np.linalg.norm(prods - (coeffs.T @ flat), axis=1)
        worst = max(worst, float(resid.max()) if resid.size else 0.0)
    if worst > tol:
        raise InvalidInputError(f"span is not closed under multiplication (residual {worst:.3e})")
    return worst


def _null_space(m, tol, scale=1.0):
    """Null space with cutoff ``tol * max(sigma_max, scale)``.

    The floor matters when every column is rounding noise (a commutative
    algebra), where a purely relative cutoff would count noise as rank.
    """
    if m.shape[1] == 0:
        return np.zeros((0, 0))
    _, s, vh = np.linalg.svd(m, full_matrices=m.shape[0] < m.shape[1])
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(smax, scale)))
    return mc.adjoint(vh[rank:])


def _center(cs, tol):
    """Basis of the center of the algebra spanned by the matrices ``cs``."""
    m = len(cs)
    r = cs[0].shape[0]
    # column k holds the commutators [c_k, c_l] for all l
    cols = np.empty((m * r * r, m), dtype=complex)
    for k, ck in enumerate(cs):
        cols[:, k] = np.concatenate([(ck @ cl - cl @ ck).ravel() for cl in cs])
    null = _null_space(cols, tol)
    return [np.tensordot(null[:, j], np.stack(cs), axes=1) for j in range(null.shape[1])]


def _cluster(values, groups, sizes=None):
    """Split sorted eigenvalues into ``groups`` runs.

    Cuts at the largest gaps, or into runs of fixed ``sizes``.  Returns the
    list of index arrays and the ratio (largest within-run spread) / (smallest
    cut gap), which must be small for the split to be trusted.
    """
    n = len(values)
    if sizes is not None:
        bounds = np.cumsum([0] + list(sizes))
    else:
        gaps = np.diff(values)
        cuts = np.sort(np.argsort(gaps)[::-1][:groups - 1]) + 1 if groups > 1 else np.array([], int)
        bounds = np.concatenate([[0], cuts, [n]]).astype(int)
    runs = [np.arange(bounds[j], bounds[j + 1]) for j in range(len(bounds) - 1)]
    spread = max((values[r[-1]] - values[r[0]]) for r in runs if len(r))
    cut_gaps = [values[bounds[j]] - values[bounds[j] - 1] for j in range(1, len(bounds) - 1)]
    gap = min(cut_gaps) if cut_gaps else np.inf
    scale = max(1.0, float(np.max(np.abs(values))) if n else 1.0)
    ratio = max(spread, 1e-300) / gap if np.isfinite(gap) else spread / scale
    return runs, ratio


def _random_hermitian(mats, rng):
    g = rng.standard_normal(len(mats))
    h = np.tensordot(g, np.stack(mats), axes=1)
    h = h + mc.adjoint(h)
    return h / max(1.0, np.linalg.norm(h, 2))


def _block_frame(block_mats, n, mu, rng, tol):
    """Columns ``u[(r, i)]`` (copy r, row i) realizing ``I_mu (x) M_n`` on one block."""
    size = n * mu
    if n == 1:
        return np.eye(size, dtype=complex)
    for _ in range(_TRIES):
        h = _random_hermitian(block_mats, rng)
        w, v = np.linalg.eigh(h)
        runs, ratio = _cluster(w, n, [mu] * n)
        if ratio < 1e-6:
            break
    else:
        raise NumericalDegeneracyError("could not split a simple block into matrix units")
    f = v[:, runs[0]]
    frame = np.zeros((size, size), dtype=complex)
    for i, run in enumerate(runs):
        g = v[:, run]
        ws = [mc.adjoint(f) @ a @ g for a in block_mats]
        w_best = max(ws, key=lambda x: np.linalg.norm(x))
        nrm = np.linalg.norm(w_best) / np.sqrt(mu)
        if nrm < tol:
            raise NumericalDegeneracyError("matrix-unit search found no connecting element")
        w_best = w_best / nrm
        # v_i = f w g*, so v_i* f_r = g w*[:, r]
        cols = g @ mc.adjoint(w_best)
        for r in range(mu):
            frame[:, r * n + i] = cols[:, r]
    return frame


def central_decomposition(span, tol=mc.DEFAULT_TOL) -> Decomposition:
    """Decompose a concrete *-algebra into simple blocks.

    Parameters
    ----------
    span : list of (D, D) complex arrays
        A spanning set of the algebra.  It must be closed under adjoint and
        product and contain its own unit.
    tol : float
        Relative tolerance for ranks and closure residuals.

    Returns
    -------
    Decomposition
    """
    space = mc.onb_span(span, tol)
    if space.dim == 0:
        raise InvalidInputError("cannot decompose the zero algebra")
    D = space.shape[0]
    if space.shape[0] != space.shape[1]:
        raise InvalidInputError("algebra elements must be square")
    closure_tol = max(1e3 * tol, 1e-6)
    _check_closure(space, closure_tol)

    e = mc.range_basis(np.hstack(list(space.basis)), tol)
    r = e.shape[1]
    unit = e @ mc.adjoint(e)
    if space.residual(unit) > closure_tol:
        raise InvalidInputError("span does not contain its own unit")
    cs = [mc.adjoint(e) @ b @ e for b in space.basis]

    rng = np.random.default_rng(_SEED)
    center = _center(cs, tol)
    kc = len(center)
    if kc == 0:
        raise NumericalDegeneracyError("empty center")
    for _ in range(_TRIES):
        h = _random_hermitian(center, rng)
        w, v = np.linalg.eigh(h)
        runs, ratio = _cluster(w, kc)
        if ratio < 1e-6:
            break
    else:
        raise NumericalDegeneracyError("center diagonalization is ill-conditioned")

    blocks = []
    for run in runs:
        vc = v[:, run]
        bm = [mc.adjoint(vc) @ c @ vc for c in cs]
        dim = mc.onb_span(bm, tol, scale=1.0).dim
        n = int(round(np.sqrt(dim)))
        if n * n != dim or len(run) % n:
            raise NumericalDegeneracyError(f"block of dimension {dim} on a {len(run)}-dim space is not simple")
        mu = len(run) // n
        frame = vc @ _block_frame(bm, n, mu, rng, tol)
        proj = e @ vc @ mc.adjoint(vc) @ mc.adjoint(e)
        diag = np.real(np.diag(proj))
        first = int(np.argmax(diag > 1e-6))
        blocks.append((first, -float(diag[first]), n, mu, e @ frame, proj))
    blocks.sort(key=lambda b: (b[0], b[1]))

    cols = [b[4] for b in blocks]
    comp = mc.range_basis(np.eye(D) - unit, tol) if r < D else np.zeros((D, 0), dtype=complex)
    unitary = np.hstack(cols + [comp])
    dec = Decomposition(tuple(b[2] for b in blocks), tuple(b[3] for b in blocks),
                        unitary, r, tuple(b[5] for b in blocks))

    alg = dec.algebra
    worst = 0.0
    for b in space.basis:
        c = mc.adjoint(unitary) @ b @ unitary
        ok, x = is_member(c[:r, :r], alg, 1.0)
        worst = max(worst, float(np.linalg.norm(c[:r, :r] - x.ambient())),
                    float(np.linalg.norm(c[r:, :])), float(np.linalg.norm(c[:, r:])))
    if worst > closure_tol:
        raise NumericalDegeneracyError(f"standard form not reached (residual {worst:.3e})")
    return dec

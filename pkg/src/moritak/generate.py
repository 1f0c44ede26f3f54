"""Seeded random instances within fixed size caps.

Every generator takes a :class:`numpy.random.Generator`; :func:`trial_rng`
derives one per (seed, stream, trial) from a counter-based Philox bit
generator, so streams are independent and reproducible.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import matrix_core as mc
from .algebra import Algebra, AlgebraMatrix, dsum, mv_partial_isometry
from .bimodule import (Bimodule, conjugate, corner_bimodule, internal_tensor,
                       make_bimodule)
from .hilbert import HilbertModule, ModuleOperator, direct_sum


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    trials: int = 50
    max_blocks: int = 3
    max_block_size: int = 4
    max_ambient_rank: int = 4
    max_multiplicity: int = 2
    max_linking_dim: int = 60
    tol: float = mc.DEFAULT_TOL

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if min(self.max_blocks, self.max_block_size, self.max_ambient_rank, self.max_multiplicity) < 1:
            raise ValueError("size caps must be positive")
        if self.max_linking_dim < 4:
            raise ValueError("linking dimension cap must be at least 4")


def trial_rng(seed: int, stream: str, trial: int = 0) -> np.random.Generator:
    key = zlib.crc32(stream.encode())
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(key, int(trial)))
    return np.random.Generator(np.random.Philox(ss))


def _cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    q, r = np.linalg.qr(_cgauss(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_algebra(rng, cfg: SuiteConfig = SuiteConfig()) -> Algebra:
    k = int(rng.integers(1, cfg.max_blocks + 1))
    sizes = rng.integers(1, cfg.max_block_size + 1, size=k)
    mults = rng.integers(1, cfg.max_multiplicity + 1, size=k)
    return Algebra(tuple(int(s) for s in sizes), tuple(int(m) for m in mults))


def projection_with_ranks(rng, alg: Algebra, n: int, ranks) -> AlgebraMatrix:
    """A unitarily rotated 0/1 diagonal with the given block ranks."""
    blocks = []
    for size, r in zip(alg.block_sizes, ranks):
        u = random_unitary(rng, n * size)
        blocks.append((u[:, :r] @ mc.adjoint(u[:, :r])))
    return AlgebraMatrix(alg, n, n, tuple(blocks))


def random_projection(rng, alg: Algebra, n: int, nonzero=False) -> AlgebraMatrix:
    while True:
        ranks = [int(rng.integers(0, n * s + 1)) for s in alg.block_sizes]
        if not nonzero or any(ranks):
            return projection_with_ranks(rng, alg, n, ranks)


def random_module(rng, alg: Algebra, cfg: SuiteConfig = SuiteConfig(), n=None, nonzero=False) -> HilbertModule:
    if n is None:
        n = int(rng.integers(1, cfg.max_ambient_rank + 1))
    return HilbertModule(alg, random_projection(rng, alg, n, nonzero))


def random_operator(rng, m: HilbertModule, n: HilbertModule, rank_deficient=None) -> ModuleOperator:
    """A compressed operator ``M -> N`` with singular values in ``[0.5, 2]`` or zero.

    Each block maps an orthonormal range basis of ``p`` to one of ``q``
    through a random matrix with controlled conditioning.
    """
    alg = m.algebra
    if rank_deficient is None:
        rank_deficient = bool(rng.integers(0, 2))
    blocks = []
    for pb, qb in zip(m.projection.reduced, n.projection.reduced):
        bp = mc.range_basis(pb, 1e-9) if pb.size else np.zeros((pb.shape[0], 0), dtype=complex)
        bq = mc.range_basis(qb, 1e-9) if qb.size else np.zeros((qb.shape[0], 0), dtype=complex)
        rp, rq = bp.shape[1], bq.shape[1]
        full = min(rp, rq)
        r = int(rng.integers(0, full + 1)) if rank_deficient else full
        s = rng.uniform(0.5, 2.0, size=r)
        core = random_unitary(rng, rq)[:, :r] @ np.diag(s) @ mc.adjoint(random_unitary(rng, rp)[:, :r])
        blocks.append(bq @ core @ mc.adjoint(bp))
    t = AlgebraMatrix(alg, n.ambient_rank, m.ambient_rank, tuple(blocks))
    return ModuleOperator(m, n, t)


def random_invertible(rng, m: HilbertModule) -> ModuleOperator:
    """An invertible endomorphism of ``M`` (``p + z`` with ``||z|| <= 1/2``)."""
    p = m.projection
    if m.ambient_rank == 0:
        return m.identity()
    blocks = tuple(_cgauss(rng, *b.shape) for b in p.reduced)
    z = p @ AlgebraMatrix(m.algebra, p.rows, p.cols, blocks) @ p
    nz = z.norm()
    t = p + (0.5 / nz) * z if nz > 0 else p
    return ModuleOperator(m, m, t)


def random_operator_pair(rng, alg, cfg=SuiteConfig()):
    """Modules ``M, N`` and an operator ``M -> N``."""
    m = random_module(rng, alg, cfg)
    n = random_module(rng, alg, cfg)
    return random_operator(rng, m, n)


@dataclass(frozen=True, eq=False)
class QuasiStableInstance:
    operator: ModuleOperator
    m: HilbertModule
    n: HilbertModule
    x: HilbertModule


def random_quasi_stable(rng, alg, cfg=SuiteConfig()) -> QuasiStableInstance:
    """An invertible ``T: M + X -> N + X`` built from an explicit isomorphism ``M = N``."""
    nm = int(rng.integers(1, cfg.max_ambient_rank + 1))
    nn = int(rng.integers(nm, cfg.max_ambient_rank + 1))
    pm = random_projection(rng, alg, nm)
    ranks = [int(round(np.trace(b).real)) for b in pm.reduced]
    m = HilbertModule(alg, pm)
    n = HilbertModule(alg, projection_with_ranks(rng, alg, nn, ranks))
    x = random_module(rng, alg, cfg)
    u = mv_partial_isometry(m.projection, n.projection)
    core = ModuleOperator(direct_sum(m, x), direct_sum(n, x), dsum(u, x.projection))
    dom, cod = core.domain, core.codomain
    t = random_invertible(rng, cod) @ core @ random_invertible(rng, dom)
    return QuasiStableInstance(t, m, n, x)


# -- bimodules ----------------------------------------------------------------


def _linking_shape(rng, cfg: SuiteConfig, allow_pure_b=False, allow_pure_a=False):
    """Block data ``(a_c, b_c, mu_c)`` of a random linking algebra."""
    cap = cfg.max_block_size
    while True:
        k = int(rng.integers(1, cfg.max_blocks + 1))
        shape = []
        for _ in range(k):
            lo_a = 0 if allow_pure_b else 1
            lo_b = 0 if allow_pure_a else 1
            a = int(rng.integers(lo_a, cap + 1))
            b = int(rng.integers(lo_b, cap + 1))
            if a + b == 0:
                continue
            shape.append((a, b, int(rng.integers(1, cfg.max_multiplicity + 1))))
        if not shape or not any(a for a, _, _ in shape) or not any(b for _, b, _ in shape):
            continue
        if sum((a + b) ** 2 for a, b, _ in shape) <= cfg.max_linking_dim:
            return shape


def random_linking_algebra(rng, cfg=SuiteConfig(), allow_pure_b=False):
    """A rotated multi-matrix algebra with a corner projection ``P_A``.

    Returns ``(span, P_A, P_B)``.  Every central block meets both corners
    unless ``allow_pure_b``, in which case some blocks lie entirely under
    ``P_B`` (the corner bimodule is then left-full only).
    """
    shape = _linking_shape(rng, cfg, allow_pure_b=allow_pure_b)
    L = Algebra(tuple(a + b for a, b, _ in shape), tuple(mu for _, _, mu in shape))
    diag = []
    for a, b, mu in shape:
        diag.extend(([1.0] * a + [0.0] * b) * mu)
    pa = np.diag(np.array(diag, dtype=complex))
    q = random_unitary(rng, L.ambient_dim)
    span = [q @ L.embed(e) @ mc.adjoint(q) for e in L.basis()]
    pa = q @ pa @ mc.adjoint(q)
    return span, pa, np.eye(L.ambient_dim) - pa


def random_corner_bimodule(rng, cfg=SuiteConfig(), left_full_only=False) -> Bimodule:
    span, pa, pb = random_linking_algebra(rng, cfg, allow_pure_b=left_full_only)
    return corner_bimodule(span, pa, pb, cfg.tol)


def random_imprimitivity(rng, cfg=SuiteConfig()) -> Bimodule:
    return random_corner_bimodule(rng, cfg)


def _commutant_unitary(rng, alg: Algebra) -> np.ndarray:
    """A unitary commuting with the standard representation (mixes copies)."""
    parts = [np.kron(random_unitary(rng, mu), np.eye(n)) for n, mu in zip(alg.block_sizes, alg.multiplicities)]
    d = alg.ambient_dim
    out = np.zeros((d, d), dtype=complex)
    for off, part in zip(alg.offsets, parts):
        out[off:off + part.shape[0], off:off + part.shape[0]] = part
    return out


def bimodule_from_left(rng, left: Algebra, cfg=SuiteConfig(), extra_blocks=None, right_full=False) -> Bimodule:
    """A left-full bimodule with prescribed left algebra.

    Block ``j`` of ``left`` (size ``m_j``, multiplicity ``nu_j``) is paired
    with a right block of size ``c_j`` and the same multiplicity; extra
    right blocks (never touched, so not right-full) may be added, the right
    blocks are shuffled, and both sides are twisted by commutant unitaries.
    """
    cap = cfg.max_block_size
    pairs = [(int(rng.integers(1, cap + 1)), nu) for nu in left.multiplicities]
    if extra_blocks is None:
        extra_blocks = 0 if right_full else int(rng.integers(0, 2))
    extras = [(int(rng.integers(1, cap + 1)), int(rng.integers(1, cfg.max_multiplicity + 1)))
              for _ in range(extra_blocks)]
    blocks = pairs + extras
    order = rng.permutation(len(blocks))
    right = Algebra(tuple(blocks[o][0] for o in order), tuple(blocks[o][1] for o in order))
    where = {int(o): pos for pos, o in enumerate(order)}
    basis = []
    for j, (m, nu) in enumerate(zip(left.block_sizes, left.multiplicities)):
        jr = where[j]
        c = right.block_sizes[jr]
        for a in range(m):
            for b in range(c):
                x = np.zeros((left.ambient_dim, right.ambient_dim), dtype=complex)
                for r in range(nu):
                    x[left.offsets[j] + r * m + a, right.offsets[jr] + r * c + b] = 1.0
                basis.append(x)
    wl, wr = _commutant_unitary(rng, left), _commutant_unitary(rng, right)
    return make_bimodule(left, right, [wl @ x @ wr for x in basis], cfg.tol)


def random_left_full(rng, cfg=SuiteConfig()) -> Bimodule:
    """Alternates corner bimodules (with pure right blocks) and direct ones."""
    if rng.integers(0, 2):
        return random_corner_bimodule(rng, cfg, left_full_only=True)
    return bimodule_from_left(rng, random_algebra(rng, cfg), cfg)


def random_chain(rng, cfg=SuiteConfig()):
    """Composable left-full ``X: A-B`` and ``Y: B-C`` with identical middle representation."""
    x = random_left_full(rng, cfg)
    y = bimodule_from_left(rng, x.right, cfg)
    return x, y


def random_bimodule(rng, cfg=SuiteConfig()) -> Bimodule:
    """Any of the generated families, including tensor products and conjugates."""
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return random_imprimitivity(rng, cfg)
    if kind == 1:
        return random_left_full(rng, cfg)
    if kind == 2:
        x, y = random_chain(rng, cfg)
        return internal_tensor(x, y, cfg.tol)
    return conjugate(random_left_full(rng, cfg))


def corrupt_bimodule_basis(rng, X: Bimodule):
    """Basis of ``X`` with one element pushed out of the axioms (negative control)."""
    basis = X.basis
    bad = np.zeros(X.shape, dtype=complex)
    bad[0, :] = 1.0
    bad[:, -1] += 0.5
    basis.append(bad + 0.1 * _cgauss(rng, *X.shape))
    return basis


# -- documents ------------------------------------------------------------------

GENERATED_KINDS = ("algebra", "projection", "module", "operator", "bimodule",
                   "bimodule-left-full", "bimodule-imprimitivity")


def generate(kind: str, cfg: SuiteConfig = SuiteConfig(), trial: int = 0):
    """A document for a random instance of ``kind``."""
    from .documents import Document
    rng = trial_rng(cfg.seed, f"generate:{kind}", trial)
    if kind == "algebra":
        return Document("algebra", random_algebra(rng, cfg))
    if kind in ("module", "projection"):
        return Document("module", random_module(rng, random_algebra(rng, cfg), cfg))
    if kind == "operator":
        return Document("operator", random_operator_pair(rng, random_algebra(rng, cfg), cfg))
    if kind == "bimodule":
        return Document("bimodule", random_bimodule(rng, cfg))
    if kind == "bimodule-left-full":
        return Document("bimodule", random_left_full(rng, cfg))
    if kind == "bimodule-imprimitivity":
        return Document("bimodule", random_imprimitivity(rng, cfg))
    raise ValueError(f"unknown instance kind {kind!r}; choose from {', '.join(GENERATED_KINDS)}")

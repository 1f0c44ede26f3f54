"""Concretely represented Hilbert bimodules.

A Hilbert ``A``-``B``-bimodule is stored as a linear space ``X`` of complex
``d_A x d_B`` matrices, where ``A`` and ``B`` act through their standard
representations on ``C^{d_A}`` and ``C^{d_B}``.  The inner products are
``(x|y) = x y*`` (valued in ``A``) and ``<x, y> = x* y`` (valued in ``B``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matrix_core as mc
from .algebra import Algebra, AlgebraElement, AlgebraMatrix, is_member
from .decomposition import Decomposition, central_decomposition
from .errors import AxiomViolationError, InvalidInputError
from .hilbert import HilbertModule, ModuleOperator

# the algebra's multiplicities fix its standard representation
Representation = Algebra


@dataclass(frozen=True, eq=False)
class Bimodule:
    left: Algebra
    right: Algebra
    space: mc.Subspace
    tol: float = mc.DEFAULT_TOL

    @property
    def basis(self) -> list:
        return list(self.space.basis)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def shape(self):
        return (self.left.ambient_dim, self.right.ambient_dim)

    def element(self, coeffs) -> np.ndarray:
        return self.space.element(coeffs)

    def random_element(self, rng) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.element(c)

    @cached_property
    def left_algebra_span(self) -> mc.Subspace:
        return _algebra_span(self.left)

    @cached_property
    def right_algebra_span(self) -> mc.Subspace:
        return _algebra_span(self.right)

    def to_json(self) -> dict:
        return {"left": {"algebra": self.left.to_json(), "multiplicities": list(self.left.multiplicities)},
                "right": {"algebra": self.right.to_json(), "multiplicities": list(self.right.multiplicities)},
                "basis": [mc_json(b) for b in self.basis]}


def mc_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _algebra_span(alg: Algebra) -> mc.Subspace:
    return mc.onb_span([alg.embed(e) for e in alg.basis()])


def axiom_residuals(left: Algebra, right: Algebra, space: mc.Subspace) -> dict:
    """Worst residual of each representation axiom over basis/generator pairs."""
    res = {"a": 0.0, "b": 0.0, "c": 0.0, "d": 0.0}
    if space.dim == 0:
        return res
    lgen = [left.embed(e) for e in left.basis()]
    rgen = [right.embed(e) for e in right.basis()]
    lspan, rspan = _algebra_span(left), _algebra_span(right)
    for x in space.basis:
        for a in lgen:
            res["a"] = max(res["a"], space.residual(a @ x))
        for b in rgen:
            res["b"] = max(res["b"], space.residual(x @ b))
        for y in space.basis:
            res["c"] = max(res["c"], lspan.residual(x @ mc.adjoint(y)))
            res["d"] = max(res["d"], rspan.residual(mc.adjoint(x) @ y))
    return res


def make_bimodule(left: Algebra, right: Algebra, basis, tol=mc.DEFAULT_TOL) -> Bimodule:
    """Validate and orthonormalize a concrete bimodule.

    Raises :class:`AxiomViolationError` naming the first failed axiom:
    ``a`` (left action), ``b`` (right action), ``c`` (``x y*`` in ``A``),
    ``d`` (``x* y`` in ``B``) or ``isometry``.
    """
    shape = (left.ambient_dim, right.ambient_dim)
    basis = list(basis)
    for b in basis:
        if np.shape(b) != shape:
            raise InvalidInputError(f"basis matrix of shape {np.shape(b)}, expected {shape}")
    space = mc.onb_span(basis, tol, shape=shape)
    res = axiom_residuals(left, right, space)
    limit = max(tol, 1e-10)
    for ax in ("a", "b", "c", "d"):
        if res[ax] > limit:
            raise AxiomViolationError(ax, f"residual {res[ax]:.3e} exceeds {limit:.1e}", res[ax])
    x = Bimodule(left, right, space, tol)
    if space.dim:
        z = space.element(np.linspace(1.0, 2.0, space.dim) * np.exp(1j * np.arange(space.dim)))
        gap = isometry_defect(x, z)
        if gap > 1e-9 * max(1.0, np.linalg.norm(z, 2) ** 2):
            raise AxiomViolationError("isometry", f"||x||^2 - ||(x|x)|| = {gap:.3e}", gap)
    return x


def zero_bimodule(left: Algebra, right: Algebra) -> Bimodule:
    return make_bimodule(left, right, [])


def left_inner(X: Bimodule, x, y) -> AlgebraElement:
    """``(x|y) = x y*`` as an element of ``A``."""
    ok, a = is_member(np.asarray(x) @ mc.adjoint(y), X.left, max(X.tol, 1e-9))
    if not ok:
        raise AxiomViolationError("c", "x y* is not in the left algebra")
    return a


def right_inner(X: Bimodule, x, y) -> AlgebraElement:
    """``<x, y> = x* y`` as an element of ``B``."""
    ok, b = is_member(mc.adjoint(x) @ np.asarray(y), X.right, max(X.tol, 1e-9))
    if not ok:
        raise AxiomViolationError("d", "x* y is not in the right algebra")
    return b


def isometry_defect(X: Bimodule, x) -> float:
    """``| ||x||_op^2 - ||(x|x)|| |``; zero for a faithful representation."""
    op = float(np.linalg.norm(x, 2)) ** 2 if np.size(x) else 0.0
    return abs(op - left_inner(X, x, x).norm())


def is_left_full(X: Bimodule, tol=mc.DEFAULT_TOL) -> bool:
    """``(X|X)`` is all of ``A``."""
    span = inner_span_left(X, tol)
    return mc.subspace_equal(span, X.left_algebra_span, max(tol, 1e-7))


def is_right_full(X: Bimodule, tol=mc.DEFAULT_TOL) -> bool:
    """``<X, X>`` is all of ``B``."""
    span = inner_span_right(X, tol)
    return mc.subspace_equal(span, X.right_algebra_span, max(tol, 1e-7))


def inner_span_left(X: Bimodule, tol=mc.DEFAULT_TOL) -> mc.Subspace:
    d = X.left.ambient_dim
    return mc.onb_span([x @ mc.adjoint(y) for x in X.basis for y in X.basis], tol, shape=(d, d))


def inner_span_right(X: Bimodule, tol=mc.DEFAULT_TOL) -> mc.Subspace:
    d = X.right.ambient_dim
    return mc.onb_span([mc.adjoint(x) @ y for x in X.basis for y in X.basis], tol, shape=(d, d))


def conjugate(X: Bimodule) -> Bimodule:
    """``X*``: the same space with the two sides exchanged."""
    shape = (X.right.ambient_dim, X.left.ambient_dim)
    basis = np.stack([mc.adjoint(b) for b in X.basis]) if X.dim else np.zeros((0,) + shape, dtype=complex)
    # adjoints of an orthonormal basis are orthonormal
    return Bimodule(X.right, X.left, mc.Subspace(shape, basis), X.tol)


def span_equal(X: Bimodule, Y: Bimodule, tol=1e-8) -> bool:
    return (X.left == Y.left and X.right == Y.right
            and mc.subspace_equal(X.space, Y.space, tol))


@dataclass(frozen=True, eq=False)
class LinkingAlgebraView:
    """The linking algebra ``[[A, X], [X*, B]]`` acting on ``C^{d_A + d_B}``."""

    bimodule: Bimodule
    space: mc.Subspace
    decomposition: Decomposition
    p_left: np.ndarray
    p_right: np.ndarray

    @property
    def block_sizes(self):
        return self.decomposition.block_sizes

    @property
    def multiplicities(self):
        return self.decomposition.multiplicities

    @property
    def dim(self):
        return self.space.dim

    def element(self, a: AlgebraElement, x, y, b: AlgebraElement) -> np.ndarray:
        """The matrix ``[[a, x], [y*, b]]``."""
        return np.block([[a.ambient(), np.asarray(x)], [mc.adjoint(y), b.ambient()]])


def _linking_span(X: Bimodule):
    da, db = X.shape
    D = da + db
    mats = []
    for e in X.left.basis():
        m = np.zeros((D, D), dtype=complex)
        m[:da, :da] = e.ambient()
        mats.append(m)
    for e in X.right.basis():
        m = np.zeros((D, D), dtype=complex)
        m[da:, da:] = e.ambient()
        mats.append(m)
    for x in X.basis:
        m = np.zeros((D, D), dtype=complex)
        m[:da, da:] = x
        mats.append(m)
        mats.append(mc.adjoint(m))
    return mats


def linking_algebra(X: Bimodule, tol=mc.DEFAULT_TOL) -> LinkingAlgebraView:
    """Assemble and decompose the linking algebra of ``X``."""
    mats = _linking_span(X)
    space = mc.onb_span(mats, tol)
    try:
        dec = central_decomposition(mats, tol)
    except InvalidInputError as exc:
        raise AxiomViolationError("closure", str(exc)) from exc
    da, db = X.shape
    pl = np.zeros((da + db,) * 2, dtype=complex)
    pl[:da, :da] = np.eye(da)
    pr = np.eye(da + db) - pl
    return LinkingAlgebraView(X, space, dec, pl, pr)


def corner_bimodule(L, p_left, p_right, tol=mc.DEFAULT_TOL) -> Bimodule:
    """The bimodule ``P_A L P_B`` between the two corners of ``L``.

    ``L`` is a :class:`LinkingAlgebraView`, a :class:`~moritak.matrix_core.Subspace`
    or a spanning list of square matrices; the projections must be nonzero,
    complementary and in ``L``.
    """
    if isinstance(L, LinkingAlgebraView):
        space = L.space
    elif isinstance(L, mc.Subspace):
        space = L
    else:
        space = mc.onb_span(list(L), tol)
    p_left, p_right = mc.as_cmatrix(p_left), mc.as_cmatrix(p_right)
    D = space.shape[0]
    if p_left.shape != (D, D) or p_right.shape != (D, D):
        raise InvalidInputError("projections have the wrong shape")
    if np.linalg.norm(p_left + p_right - np.eye(D)) > 1e-7:
        raise InvalidInputError("P_A + P_B is not the identity")
    for name, p in (("P_A", p_left), ("P_B", p_right)):
        if not mc.is_self_adjoint_idempotent(p, 1e-7):
            raise InvalidInputError(f"{name} is not a projection")
        if np.linalg.norm(p) < 0.5:
            raise InvalidInputError(f"{name} is zero")
        if space.residual(p) > 1e-7:
            raise InvalidInputError(f"{name} is not in the algebra")
    ea, eb = mc.range_basis(p_left, 1e-7), mc.range_basis(p_right, 1e-7)
    dec_a = central_decomposition([mc.adjoint(ea) @ s @ ea for s in space.basis], tol)
    dec_b = central_decomposition([mc.adjoint(eb) @ s @ eb for s in space.basis], tol)
    fa, fb = ea @ dec_a.frame, eb @ dec_b.frame
    xs = mc.onb_span([mc.adjoint(fa) @ s @ fb for s in space.basis], tol,
                     shape=(fa.shape[1], fb.shape[1]), scale=1.0)
    return make_bimodule(dec_a.algebra, dec_b.algebra, xs.basis, tol)


def internal_tensor(X: Bimodule, Y: Bimodule, tol=mc.DEFAULT_TOL) -> Bimodule:
    """``X (x)_B Y`` realized as the span of the products ``x y``."""
    if X.right.block_sizes != Y.left.block_sizes:
        raise InvalidInputError("middle algebras differ")
    if X.right != Y.left:
        raise InvalidInputError("middle algebra is represented differently on the two sides")
    shape = (X.shape[0], Y.shape[1])
    prods = mc.onb_span([x @ y for x in X.basis for y in Y.basis], tol, shape=shape, scale=1.0)
    return make_bimodule(X.left, Y.right, prods.basis, tol)


def check_conjugate_tensor(X: Bimodule, tol=mc.DEFAULT_TOL) -> bool:
    """``X (x)_B X*`` coincides with ``(X|X)`` inside the left algebra."""
    t = internal_tensor(X, conjugate(X), tol)
    return mc.subspace_equal(t.space, inner_span_left(X, tol), max(tol, 1e-8))


def tensor_algebra(a1: Algebra, a2: Algebra):
    """``A_1 (x) A_2`` in standard form and the permutation from Kronecker order.

    Returns ``(algebra, perm)`` with ``perm @ kron(pi_1(a), pi_2(b)) @ perm.T``
    equal to the standard representation of ``a (x) b``.
    """
    sizes, mults = [], []
    for n, mu in zip(a1.block_sizes, a1.multiplicities):
        for m, nu in zip(a2.block_sizes, a2.multiplicities):
            sizes.append(n * m)
            mults.append(mu * nu)
    alg = Algebra(tuple(sizes), tuple(mults))
    d1, d2 = a1.ambient_dim, a2.ambient_dim
    perm = np.zeros((d1 * d2, d1 * d2))
    blk = 0
    for i, (n, mu) in enumerate(zip(a1.block_sizes, a1.multiplicities)):
        for j, (m, nu) in enumerate(zip(a2.block_sizes, a2.multiplicities)):
            off = alg.offsets[blk]
            for c1 in range(mu):
                for c2 in range(nu):
                    c = c1 * nu + c2
                    for a in range(n):
                        for b in range(m):
                            src = (a1.offsets[i] + c1 * n + a) * d2 + a2.offsets[j] + c2 * m + b
                            perm[off + c * n * m + a * m + b, src] = 1.0
            blk += 1
    return alg, perm


def external_tensor(X1: Bimodule, X2: Bimodule, tol=mc.DEFAULT_TOL) -> Bimodule:
    """``X_1 (x) X_2`` over ``(A_1 (x) A_2, B_1 (x) B_2)``."""
    la, pa = tensor_algebra(X1.left, X2.left)
    rb, pb = tensor_algebra(X1.right, X2.right)
    basis = [pa @ mc.kron(x, y) @ pb.T for x in X1.basis for y in X2.basis]
    return make_bimodule(la, rb, basis, tol)


# -- tensoring modules and operators with a bimodule ------------------------


@dataclass(frozen=True, eq=False)
class TensorModule:
    """``M (x)_A X`` realized as ``p X^n``: stacked ``(n d_A) x d_B`` matrices."""

    module: HilbertModule
    bimodule: Bimodule
    space: mc.Subspace

    @property
    def algebra(self) -> Algebra:
        return self.bimodule.right

    def inner(self, xi, eta) -> AlgebraElement:
        ok, b = is_member(mc.adjoint(xi) @ np.asarray(eta), self.algebra, 1e-8)
        if not ok:
            raise AxiomViolationError("d", "inner product left the right algebra")
        return b

    @cached_property
    def framing(self):
        """``(HilbertModule over B, V)`` with ``V`` a unitary from it onto this space.

        ``V`` is stored concretely as the ``(n d_A) x (m d_B)`` matrix
        ``[w_1 ... w_m] pi_B(G^+)^{1/2}`` for generators ``w_i`` with Gram
        matrix ``G``.
        """
        return _frame(self)

    def as_module(self) -> HilbertModule:
        return self.framing[0]


@dataclass(frozen=True, eq=False)
class TensorOperator:
    """``T (x) I_X``: left multiplication by ``pi_A(t)`` on stacked columns."""

    operator: ModuleOperator
    domain: TensorModule
    codomain: TensorModule
    matrix: np.ndarray

    def as_operator(self) -> ModuleOperator:
        """The same map as an adjointable operator between modules over ``B``."""
        m, vm = self.domain.framing
        n, vn = self.codomain.framing
        alg = self.domain.algebra
        if m.ambient_rank == 0 or n.ambient_rank == 0:
            return ModuleOperator.zero(m, n)
        amb = mc.adjoint(vn) @ self.matrix @ vm
        t = AlgebraMatrix.from_ambient(alg, amb, n.ambient_rank, m.ambient_rank, 1e-7)
        return ModuleOperator.compressed(m, n, t)

    def norm(self) -> float:
        return self.as_operator().norm()


def module_tensor(M: HilbertModule, X: Bimodule, tol=mc.DEFAULT_TOL) -> TensorModule:
    if M.algebra != X.left:
        raise InvalidInputError("module algebra differs from the left algebra of the bimodule")
    n = M.ambient_rank
    da, db = X.shape
    p = M.projection.to_ambient() if n else np.zeros((0, 0))
    vecs = []
    for i in range(n):
        for x in X.basis:
            col = np.zeros((n * da, db), dtype=complex)
            col[i * da:(i + 1) * da] = x
            vecs.append(p @ col)
    return TensorModule(M, X, mc.onb_span(vecs, tol, shape=(n * da, db), scale=1.0))


def op_tensor(T: ModuleOperator, X: Bimodule, tol=mc.DEFAULT_TOL) -> TensorOperator:
    dom, cod = module_tensor(T.domain, X, tol), module_tensor(T.codomain, X, tol)
    t = T.matrix.to_ambient() if T.matrix.rows and T.matrix.cols else \
        np.zeros((cod.space.shape[0], dom.space.shape[0]), dtype=complex)
    return TensorOperator(T, dom, cod, t)


def _psd_inverse_sqrt(a, tol=1e-10, cut=None):
    """``a^{+1/2}`` for positive ``a``, dropping eigenvalues at or below the cutoff.

    The cutoff is ``cut`` when given, else ``tol`` times the top eigenvalue.
    """
    if a.size == 0:
        return a
    w, v = np.linalg.eigh((a + mc.adjoint(a)) / 2)
    if cut is None:
        cut = tol * max(float(w.max()), 1e-300)
    inv = np.where(w > cut, 1.0 / np.sqrt(np.clip(w, 1e-300, None)), 0.0)
    return (v * inv) @ mc.adjoint(v)


def _psd_support(a, cut):
    """Range projection of a positive matrix at an absolute cutoff."""
    if a.size == 0:
        return a
    w, v = np.linalg.eigh((a + mc.adjoint(a)) / 2)
    keep = v[:, w > cut]
    return keep @ mc.adjoint(keep)


def _frame(tm: TensorModule):
    alg = tm.algebra
    db = alg.ambient_dim
    rgen = [alg.embed(e) for e in alg.basis()]
    rows = tm.space.shape[0]
    gens = []
    covered = mc.zero_subspace(tm.space.shape)
    # greedy: keep a complex basis vector only if the B-span so far misses it
    for w in tm.space.basis:
        if covered.residual(w) <= 1e-7:
            continue
        gens.append(w)
        covered = mc.onb_span([g @ f for g in gens for f in rgen], 1e-9, shape=tm.space.shape)
        if covered.dim == tm.space.dim:
            break
    m = len(gens)
    if m == 0:
        return HilbertModule.zero(alg, 0), np.zeros((rows, 0), dtype=complex)
    wcat = np.hstack(gens)
    gram = AlgebraMatrix.from_ambient(alg, mc.adjoint(wcat) @ wcat, m, m, 1e-7)
    # one cutoff for all blocks: a block of pure rounding noise has no support
    cut = 1e-10 * max(gram.norm(), 1e-300)
    root = gram.blockwise(lambda a: _psd_inverse_sqrt(a, cut=cut), m, m)
    support = gram.blockwise(lambda a: _psd_support(a, cut), m, m)
    v = wcat @ root.to_ambient()
    return HilbertModule(alg, support, 1e-7), v

import numpy as np
import pytest

from moritak.algebra import AlgebraMatrix, K0Class, dsum as mat_dsum, make_algebra, minimal_projection
from moritak.errors import InvalidInputError, NumericalDegeneracyError
from moritak.fredholm import (adjoint, compose, fredholm_equivalent, index, is_fredholm,
                              kernel_factorization, perturbation_radius, pseudo_inverse,
                              regularize, regularize_unitized, same_index_witness,
                              standard_index_op)
from moritak.generate import (random_algebra, random_invertible, random_module,
                              random_operator, random_operator_pair, random_projection)
from moritak.hilbert import HilbertModule, ModuleOperator, direct_sum, dsum, module_rank, omega

from conftest import SMALL, seeded


def _oracle_index(t):
    """Per-block kernel and cokernel ranks computed directly with numpy."""
    out = []
    for pb, qb, tb, n in zip(t.domain.projection.reduced, t.codomain.projection.reduced,
                             t.matrix.reduced, t.algebra.block_sizes):
        rank_t = np.linalg.matrix_rank(tb, tol=1e-8 * max(1.0, np.linalg.norm(tb, 2))) if tb.size else 0
        rp = int(round(np.trace(pb).real)) if pb.size else 0
        rq = int(round(np.trace(qb).real)) if qb.size else 0
        out.append((rp - rank_t) - (rq - rank_t))
    return tuple(out)


def _random_op(rng, alg=None):
    alg = alg or random_algebra(rng, SMALL)
    return random_operator(rng, random_module(rng, alg, SMALL), random_module(rng, alg, SMALL))


class TestBasics:
    def test_compose_with_identity(self):
        for rng in seeded("compose-id", 4):
            t = _random_op(rng)
            assert compose(t, t.domain.identity()).matrix.allclose(t.matrix, 1e-12)

    def test_double_adjoint(self):
        t = _random_op(np.random.default_rng(1))
        assert adjoint(adjoint(t)).matrix.allclose(t.matrix, 0)

    def test_dsum_with_zero_module(self):
        t = _random_op(np.random.default_rng(2))
        z = HilbertModule.zero(t.algebra, 0)
        s = dsum(t, ModuleOperator.zero(z, z))
        assert s.matrix.allclose(t.matrix, 0) and s.domain.ambient_rank == t.domain.ambient_rank

    def test_compression_enforced(self):
        c = make_algebra([1])
        m = HilbertModule(c, AlgebraMatrix.scalar(c, np.diag([1.0, 0.0])))
        with pytest.raises(InvalidInputError):
            ModuleOperator(m, m, AlgebraMatrix.scalar(c, np.ones((2, 2))))

    def test_compose_mismatch(self):
        rng = np.random.default_rng(3)
        alg = make_algebra([1])
        a = random_operator(rng, HilbertModule.free(alg, 1), HilbertModule.free(alg, 2))
        with pytest.raises(InvalidInputError):
            compose(a, a)


class TestPseudoInverse:
    def test_unitary(self):
        for rng in seeded("pinv-unitary", 4):
            alg = random_algebra(rng, SMALL)
            m = random_module(rng, alg, SMALL, nonzero=True)
            u = random_operator(rng, m, m, rank_deficient=False)
            # the polar part of a map of full rank on M is a unitary of M
            v = u.matrix.blockwise(lambda b: _polar(b))
            w = pseudo_inverse(ModuleOperator(m, m, v))
            assert w.pseudo_inverse.matrix.allclose(v.H, 1e-10)

    def test_zero(self):
        alg = make_algebra([2, 1])
        m, n = HilbertModule.free(alg, 2), HilbertModule(alg, minimal_projection(alg, 0))
        w = pseudo_inverse(ModuleOperator.zero(m, n))
        assert w.pseudo_inverse.norm() == 0
        assert w.kernel_projection.allclose(m.projection, 0)
        assert w.cokernel_projection.allclose(n.projection, 0)

    def test_omega_products(self):
        for rng in seeded("pinv-omega", 20):
            alg = random_algebra(rng, SMALL)
            m = random_module(rng, alg, SMALL, nonzero=True)
            k = int(rng.integers(1, 4))
            mu = [random_operator(rng, HilbertModule.free(alg, 1), m)(HilbertModule.free(alg, 1).columns()[0])
                  for _ in range(k)]
            nu = [random_operator(rng, HilbertModule.free(alg, 1), m)(HilbertModule.free(alg, 1).columns()[0])
                  for _ in range(k)]
            t = omega(nu) @ omega(mu).adjoint()
            res = pseudo_inverse(t).residuals()
            assert res["tst"] < 1e-9 * max(1.0, t.norm())
            assert res["kernel"] < 1e-9 and res["cokernel"] < 1e-9

    def test_guard_band(self):
        c = make_algebra([1])
        m = HilbertModule.free(c, 2)
        t = ModuleOperator(m, m, AlgebraMatrix.scalar(c, np.diag([1.0, 1e-8])))
        with pytest.raises(NumericalDegeneracyError):
            pseudo_inverse(t, 1e-8)


def _polar(b):
    if not b.size:
        return b
    u, _, vh = np.linalg.svd(b)
    # keep only the support of b so the result stays compressed
    r = np.linalg.matrix_rank(b, tol=1e-9)
    return u[:, :r] @ vh[:r]


class TestIndex:
    def test_identity(self):
        for rng in seeded("index-id", 4):
            m = random_module(rng, random_algebra(rng, SMALL), SMALL)
            assert index(m.identity()).is_zero()

    def test_zero_operator(self):
        for rng in seeded("index-zero", 4):
            alg = random_algebra(rng, SMALL)
            m, n = random_module(rng, alg, SMALL), random_module(rng, alg, SMALL)
            assert index(ModuleOperator.zero(m, n)) == module_rank(m) - module_rank(n)

    def test_standard_index_op(self):
        for rng in seeded("index-std", 6):
            alg = random_algebra(rng, SMALL)
            p, q = random_projection(rng, alg, 3), random_projection(rng, alg, 3)
            t = standard_index_op(p, q)
            want = tuple(a - b for a, b in zip(module_rank(t.domain).vector, module_rank(t.codomain).vector))
            assert index(t).vector == want == _oracle_index(t)

    def test_random_against_oracle(self):
        for rng in seeded("index-oracle", 15):
            t = _random_op(rng)
            assert index(t).vector == _oracle_index(t)

    def test_adjoint_negates(self):
        for rng in seeded("index-adj", 8):
            t = _random_op(rng)
            assert index(t.adjoint()) == -index(t)

    def test_composition_and_sum(self):
        for rng in seeded("index-comp", 8):
            alg = random_algebra(rng, SMALL)
            m, n, p = (random_module(rng, alg, SMALL) for _ in range(3))
            t1, t2 = random_operator(rng, m, n), random_operator(rng, n, p)
            assert index(t2 @ t1) == index(t1) + index(t2)
            assert index(dsum(t1, t2)) == index(t1) + index(t2)

    def test_invertible_conjugation(self):
        for rng in seeded("index-vtu", 6):
            t = _random_op(rng)
            u, v = random_invertible(rng, t.domain), random_invertible(rng, t.codomain)
            assert index(v @ t @ u) == index(t)

    def test_endomorphisms_have_zero_index(self):
        for rng in seeded("index-endo", 6):
            m = random_module(rng, random_algebra(rng, SMALL), SMALL)
            assert index(random_operator(rng, m, m)).is_zero()

    def test_small_perturbation(self):
        for rng in seeded("index-pert", 6):
            t = _random_op(rng)
            eps = perturbation_radius(t)
            if not np.isfinite(eps):
                continue
            d = random_operator(rng, t.domain, t.codomain, rank_deficient=False)
            dn = d.norm()
            if dn == 0:
                continue
            t2 = t + (0.4 * eps / dn) * d
            assert index(t2) == index(t)

    def test_fredholm_predicate(self):
        t = _random_op(np.random.default_rng(9))
        ok, s = is_fredholm(t)
        assert ok and s.domain.same_as(t.codomain)


class TestStandardIndexOp:
    def test_equal_projections(self):
        p = random_projection(np.random.default_rng(4), make_algebra([2, 1]), 2)
        assert index(standard_index_op(p, p)).is_zero()

    def test_scalar_example(self):
        c = make_algebra([1])
        p = AlgebraMatrix.scalar(c, np.diag([1.0, 0.0]))
        q = AlgebraMatrix.scalar(c, np.eye(2))
        t = standard_index_op(p, q)
        assert _oracle_index(t) == (-1,)
        assert index(t).vector == (-1,)

    def test_two_block_example(self):
        alg = make_algebra([2, 3])
        e1, e2 = minimal_projection(alg, 0), minimal_projection(alg, 1)
        z = AlgebraMatrix.zeros(alg, 1, 1)
        p, q = mat_dsum(e1, z), mat_dsum(z, e2)
        assert index(standard_index_op(p, q)).vector == (1, -1)

    def test_shape_mismatch(self):
        alg = make_algebra([1])
        with pytest.raises(InvalidInputError):
            standard_index_op(AlgebraMatrix.identity(alg, 1), AlgebraMatrix.identity(alg, 2))


class TestRegularize:
    def test_invertible_needs_no_padding(self):
        rng = np.random.default_rng(11)
        m = random_module(rng, make_algebra([2, 1]), SMALL, nonzero=True)
        t = random_invertible(rng, m)
        w = pseudo_inverse(t)
        tt, _ = regularize(t, w.pseudo_inverse, [], [])
        assert tt.matrix.allclose(t.matrix, 0)

    def test_kernel_corner(self):
        for rng in seeded("reg-corner", 6):
            t = _random_op(rng)
            w = pseudo_inverse(t)
            mu, nu = kernel_factorization(w)
            tt, st = regularize(t, w.pseudo_inverse, mu, nu)
            n = len(mu)
            k = tt.domain.projection - st.matrix @ tt.matrix
            nm = t.domain.ambient_rank
            corner = AlgebraMatrix.identity(t.algebra, n)
            assert k.submatrix(range(nm, nm + n), range(nm, nm + n)).allclose(corner, 1e-8)
            assert k.submatrix(range(nm), range(nm + n)).norm() < 1e-8
            assert index(tt) == index(t)
            assert index(tt).vector == _oracle_index(tt)

    def test_bad_factorization(self):
        t = _random_op(np.random.default_rng(12))
        w = pseudo_inverse(t)
        m = t.domain
        with pytest.raises(InvalidInputError):
            regularize(t, w.pseudo_inverse, m.columns(), [])

    def test_unitized(self):
        for rng in seeded("reg-unit", 6):
            t = _random_op(rng)
            r = regularize_unitized(t)
            got = index(r.regular)
            assert r.unitization.augmentation_k0(got) == 0
            assert r.unitization.restrict_k0(got) == index(t)


class TestSameIndex:
    def test_identities(self):
        m = random_module(np.random.default_rng(13), make_algebra([2, 1]), SMALL)
        w = same_index_witness(m.identity(), m.identity())
        assert w.n == 0 and w.compact.norm() < 1e-12
        assert w.unitary.matrix.allclose(dsum(m.identity(), m.identity()).matrix, 1e-12)

    def test_zero_maps_of_equal_rank(self):
        alg = make_algebra([2])
        e = AlgebraMatrix.identity(alg, 1).blockwise(lambda b: np.diag([1.0, 0.0]))
        f = AlgebraMatrix.identity(alg, 1).blockwise(lambda b: np.diag([0.0, 1.0]))
        z = HilbertModule.zero(alg, 0)
        t1 = ModuleOperator.zero(HilbertModule(alg, e), z)
        t2 = ModuleOperator.zero(HilbertModule(alg, f), z)
        w = same_index_witness(t1, t2)
        assert w.n == 0
        u = w.unitary.matrix
        assert (u.H @ u - w.unitary.domain.projection).norm() < 1e-10
        assert (u @ u.H - w.unitary.codomain.projection).norm() < 1e-10

    def test_mismatch(self):
        alg = make_algebra([1, 1])
        z = HilbertModule.zero(alg, 0)
        t1 = ModuleOperator.zero(HilbertModule(alg, minimal_projection(alg, 0)), z)
        t2 = ModuleOperator.zero(HilbertModule(alg, minimal_projection(alg, 1)), z)
        assert same_index_witness(t1, t2) is None
        assert not fredholm_equivalent(t1, t2)

    def test_random_pairs(self):
        for rng in seeded("same-index", 10):
            alg = random_algebra(rng, SMALL)
            t1 = random_operator_pair(rng, alg, SMALL)
            if rng.integers(0, 2):
                # same index by padding both modules with one extra summand
                x = random_module(rng, alg, SMALL)
                t2 = random_operator(rng, direct_sum(t1.domain, x), direct_sum(t1.codomain, x))
            else:
                t2 = random_operator_pair(rng, alg, SMALL)
            w = same_index_witness(t1, t2)
            assert (w is not None) == fredholm_equivalent(t1, t2)
            if w is not None:
                assert (w.unitary + w.compact).matrix.allclose(w.target.matrix, 1e-12)


class TestEquivalence:
    def test_reflexive(self):
        t = _random_op(np.random.default_rng(14))
        assert fredholm_equivalent(t, t)

    def test_adjoint(self):
        for rng in seeded("equiv-adj", 8):
            t = _random_op(rng)
            assert fredholm_equivalent(t, t.adjoint()) == index(t).is_zero()

    def test_standard_ops(self):
        alg = make_algebra([1, 2])
        e0, e1 = minimal_projection(alg, 0), minimal_projection(alg, 1)
        z = AlgebraMatrix.zeros(alg, 1, 1)
        a = standard_index_op(mat_dsum(e0, z), mat_dsum(z, e1))
        b = standard_index_op(mat_dsum(e0, e0, z), mat_dsum(e0, z, e1))
        assert index(a) == index(b) == K0Class(alg, (1, -1))
        assert fredholm_equivalent(a, b)

import numpy as np
import pytest

from moritak import matrix_core as mc
from moritak.algebra import (AlgebraMatrix, K0Class, dsum, idempotent_to_projection,
                             is_member, k0_of_projection, make_algebra, minimal_projection,
                             mv_partial_isometry, unitize)
from moritak.decomposition import central_decomposition
from moritak.errors import (InvalidInputError, NoEquivalenceError,
                            NumericalDegeneracyError)
from moritak.generate import projection_with_ranks, random_algebra, random_projection, random_unitary

from conftest import SMALL, seeded, unit


class TestMakeAlgebra:
    def test_ambient_dim(self):
        assert make_algebra([2, 3], [1, 1]).ambient_dim == 5

    def test_scalar_with_multiplicity(self):
        a = make_algebra([1], [4])
        assert a.ambient_dim == 4
        np.testing.assert_array_equal(a.embed(a.one()), np.eye(4))

    def test_repeated_block(self, rng):
        a = make_algebra([2], [2])
        x = rng.standard_normal((2, 2))
        want = np.block([[x, np.zeros((2, 2))], [np.zeros((2, 2)), x]])
        np.testing.assert_array_equal(a.embed(a.element([x])), want)

    @pytest.mark.parametrize("sizes, mults", [([0], [1]), ([2], [-1]), ([], []), ([1, 2], [1])])
    def test_invalid(self, sizes, mults):
        with pytest.raises(InvalidInputError):
            make_algebra(sizes, mults)

    def test_json(self):
        assert make_algebra([2, 3]).to_json() == {"blocks": [2, 3], "multiplicities": [1, 1]}


class TestIsMember:
    def test_identity(self):
        a = make_algebra([2, 1], [1, 2])
        ok, x = is_member(np.eye(a.ambient_dim), a)
        assert ok and x.allclose(a.one())

    def test_mixed_copies(self):
        a = make_algebra([1], [2])
        assert not is_member(np.diag([1.0, 2.0]), a)[0]

    def test_noise(self, rng):
        a = make_algebra([2, 3], [2, 1])
        x = a.element([rng.standard_normal((n, n)) for n in a.block_sizes])
        noisy = a.embed(x) + 1e-12 * rng.standard_normal((a.ambient_dim,) * 2)
        ok, y = is_member(noisy, a, 1e-8)
        assert ok and y.allclose(x, 1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            is_member(np.eye(3), make_algebra([2]))


class TestUnitize:
    def test_blocks_and_augmentation(self):
        u = unitize(make_algebra([2]))
        assert u.unitized.block_sizes == (2, 1)
        assert u.augmentation_k0(K0Class(u.unitized, (5, 7))) == 7

    def test_embedded_projection_has_zero_augmentation(self):
        for rng in seeded("unitize", 5):
            a = random_algebra(rng, SMALL)
            u = unitize(a)
            p = u.embed(random_projection(rng, a, 2))
            assert u.augmentation_k0(k0_of_projection(p)) == 0
            assert u.augmentation(u.embed_element(a.one())) == 0
            assert u.augmentation(u.unit()) == 1

    def test_unit_class(self):
        u = unitize(make_algebra([2, 3]))
        assert u.unitized.unit_class().vector == (2, 3, 1)

    def test_kernel_of_augmentation(self):
        u = unitize(make_algebra([2]))
        assert u.restrict_k0(K0Class(u.unitized, (3, 0))).vector == (3,)
        with pytest.raises(InvalidInputError):
            u.restrict_k0(K0Class(u.unitized, (3, 1)))


class TestK0:
    def test_unit(self):
        a = make_algebra([2, 3])
        assert k0_of_projection(AlgebraMatrix.identity(a, 1)).vector == (2, 3)

    def test_block_unit(self):
        a = make_algebra([2, 3])
        p = AlgebraMatrix.from_entries(a, [[a.element([unit(2, 0, 0), np.zeros((3, 3))])]])
        assert k0_of_projection(p).vector == (1, 0)

    def test_scalar_diagonal(self):
        c = make_algebra([1])
        p = AlgebraMatrix.scalar(c, np.diag([1.0, 1.0, 0.0]))
        assert int(round(np.trace(p.to_ambient()).real)) == 2
        assert k0_of_projection(p).vector == (2,)

    def test_not_projection(self):
        c = make_algebra([1])
        with pytest.raises(InvalidInputError):
            k0_of_projection(AlgebraMatrix.scalar(c, [[0.5]]))

    def test_trace_guard(self):
        c = make_algebra([1])
        p = AlgebraMatrix.scalar(c, [[1.0 - 1e-5]])
        with pytest.raises(NumericalDegeneracyError):
            k0_of_projection(p, tol=1e-3)

    def test_unitary_invariance_and_additivity(self):
        for rng in seeded("k0-inv", 8):
            a = random_algebra(rng, SMALL)
            p, q = random_projection(rng, a, 2), random_projection(rng, a, 3)
            u = AlgebraMatrix(a, 2, 2, tuple(random_unitary(rng, 2 * n) for n in a.block_sizes))
            assert k0_of_projection(u @ p @ u.H) == k0_of_projection(p)
            assert k0_of_projection(dsum(p, q)) == k0_of_projection(p) + k0_of_projection(q)


class TestMinimalProjection:
    def test_first_block(self):
        # blocks are numbered from 0
        assert k0_of_projection(minimal_projection(make_algebra([2, 3]), 0)).vector == (1, 0)

    def test_scalar_unit(self):
        c = make_algebra([1])
        e = minimal_projection(c, 0)
        assert e.allclose(AlgebraMatrix.identity(c, 1))
        assert k0_of_projection(e).vector == (1,)

    def test_orthogonal(self):
        a = make_algebra([2, 3, 1])
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert (minimal_projection(a, i) @ minimal_projection(a, j)).norm() == 0

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            minimal_projection(make_algebra([2]), 1)


class TestMurrayVonNeumann:
    def test_same_projection(self):
        a = make_algebra([2])
        p = AlgebraMatrix.scalar(a, np.diag([1.0, 0.0]))
        v = mv_partial_isometry(p, p)
        assert (v.H @ v - p).norm() < 1e-12 and (v @ v.H - p).norm() < 1e-12
        # for p = q the basis matching lands on p itself
        assert v.allclose(p, 1e-12)

    def test_swap(self):
        c = make_algebra([1])
        p = AlgebraMatrix.scalar(c, np.diag([1.0, 0.0]))
        q = AlgebraMatrix.scalar(c, np.diag([0.0, 1.0]))
        np.testing.assert_allclose(mv_partial_isometry(p, q).to_ambient(), unit(2, 1, 0), atol=1e-14)

    def test_class_mismatch(self):
        a = make_algebra([1, 1])
        with pytest.raises(NoEquivalenceError):
            mv_partial_isometry(minimal_projection(a, 0), minimal_projection(a, 1))

    def test_random_equal_classes(self):
        for rng in seeded("mvn", 10):
            a = random_algebra(rng, SMALL)
            p = random_projection(rng, a, 2)
            ranks = k0_of_projection(p).vector
            q = projection_with_ranks(rng, a, 3, ranks)
            v = mv_partial_isometry(p, q)
            assert (v.H @ v - p).norm() < 1e-8
            assert (v @ v.H - q).norm() < 1e-8


class TestIdempotent:
    def test_projection_fixed(self):
        a = make_algebra([2])
        p = AlgebraMatrix.scalar(a, np.diag([1.0, 0.0]))
        r, z = idempotent_to_projection(p)
        assert r.allclose(p, 1e-12) and z.allclose(AlgebraMatrix.identity(a, 2), 1e-12)

    def test_oblique(self):
        c = make_algebra([1])
        e = AlgebraMatrix.scalar(c, [[1.0, 1.0], [0.0, 0.0]])
        # oracle: z0 = 1 + (e - e*)(e* - e); r = e e* z0^-1
        em = np.array([[1.0, 1.0], [0.0, 0.0]])
        z0 = np.eye(2) + (em - em.T) @ (em.T - em)
        np.testing.assert_allclose(em @ em.T @ np.linalg.inv(z0), np.diag([1.0, 0.0]), atol=1e-14)
        r, z = idempotent_to_projection(e)
        np.testing.assert_allclose(r.to_ambient(), np.diag([1.0, 0.0]), atol=1e-12)
        assert (z @ e @ z.inverse() - r).norm() < 1e-12

    def test_rank_preserved(self):
        for rng in seeded("idem", 8):
            a = random_algebra(rng, SMALL)
            p = random_projection(rng, a, 2)
            g = AlgebraMatrix(a, 2, 2, tuple(np.eye(2 * n) + 0.3 * rng.standard_normal((2 * n, 2 * n))
                                             for n in a.block_sizes))
            e = g @ p @ g.inverse()
            r, _ = idempotent_to_projection(e)
            want = tuple(mc.rank_tol(b, 1e-8) if b.size else 0 for b in e.reduced)
            assert k0_of_projection(r).vector == want

    def test_not_idempotent(self):
        with pytest.raises(InvalidInputError):
            idempotent_to_projection(AlgebraMatrix.scalar(make_algebra([1]), [[2.0]]))


class TestCentralDecomposition:
    def test_full_matrix_algebra(self):
        dec = central_decomposition([unit(3, i, j) for i in range(3) for j in range(3)])
        assert dec.block_sizes == (3,) and dec.multiplicities == (1,)

    def test_repeated_block(self):
        span = [np.kron(np.eye(2), unit(2, i, j)) for i in range(2) for j in range(2)]
        dec = central_decomposition(span)
        assert dec.block_sizes == (2,) and dec.multiplicities == (2,)

    def test_linking_of_scalars(self):
        # the four 2x2 matrix units generate M_2
        dec = central_decomposition([unit(2, i, j) for i in range(2) for j in range(2)])
        assert dec.block_sizes == (2,) and dec.multiplicities == (1,)

    def test_rotated_recovery(self):
        rng = np.random.default_rng(3)
        alg = make_algebra([2, 1, 3], [2, 1, 2])
        q = random_unitary(rng, alg.ambient_dim)
        dec = central_decomposition([q @ alg.embed(e) @ q.conj().T for e in alg.basis()])
        assert sorted(zip(dec.block_sizes, dec.multiplicities)) == sorted([(2, 2), (1, 1), (3, 2)])
        for e in alg.basis():
            s = q @ alg.embed(e) @ q.conj().T
            np.testing.assert_allclose(dec.from_standard(dec.to_standard(s)), s, atol=1e-10)

    def test_non_unital_corner(self):
        # span of e11 inside M_2: unit is e11, complement is killed
        dec = central_decomposition([unit(2, 0, 0)])
        assert dec.block_sizes == (1,) and dec.unit_rank == 1

    def test_not_closed(self):
        with pytest.raises(InvalidInputError):
            central_decomposition([unit(2, 0, 1)])

import numpy as np
import pytest

from moritak import matrix_core as mc
from moritak.errors import InvalidInputError

from conftest import unit


class TestPinv:
    def test_projection_is_own_inverse(self):
        p = np.diag([1.0, 0.0])
        np.testing.assert_allclose(mc.pinv(p, 1e-8), p)

    def test_zero(self):
        np.testing.assert_array_equal(mc.pinv(np.zeros((2, 3)), 1e-8), np.zeros((3, 2)))

    def test_scalar(self):
        np.testing.assert_allclose(mc.pinv(np.array([[2.0]]), 1e-8), [[0.5]])

    def test_penrose_identities(self, rng):
        t = rng.standard_normal((4, 3)) @ rng.standard_normal((3, 5))
        s = mc.pinv(t, 1e-10)
        np.testing.assert_allclose(t @ s @ t, t, atol=1e-10)
        np.testing.assert_allclose(s @ t @ s, s, atol=1e-10)


class TestRank:
    def test_identity(self):
        assert mc.rank_tol(np.eye(3), 1e-8) == 3

    def test_zero(self):
        assert mc.rank_tol(np.zeros((2, 5)), 1e-8) == 0

    def test_ones(self):
        # oracle: singular values of [[1,1],[1,1]] are 2 and 0
        ones = np.ones((2, 2))
        assert np.allclose(np.linalg.svd(ones, compute_uv=False), [2.0, 0.0])
        assert mc.rank_tol(ones, 1e-8) == 1

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            mc.rank_tol(np.array([[np.nan]]), 1e-8)

    def test_rejects_nonpositive_tol(self):
        with pytest.raises(InvalidInputError):
            mc.rank_tol(np.eye(2), 0.0)

    def test_adjoint_invariant(self, rng):
        t = rng.standard_normal((3, 2)) @ rng.standard_normal((2, 4))
        assert mc.rank_tol(t, 1e-8) == mc.rank_tol(mc.adjoint(t), 1e-8) == 2


class TestOnbSpan:
    def test_duplicates_collapse(self):
        assert mc.onb_span([unit(2, 0, 0), unit(2, 0, 0)]).dim == 1

    def test_empty(self):
        assert mc.onb_span([], shape=(2, 2)).dim == 0

    def test_dependent_triple(self):
        vecs = [unit(2, 0, 0), unit(2, 1, 1), unit(2, 0, 0) + unit(2, 1, 1)]
        gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
        assert np.linalg.matrix_rank(gram) == 2
        assert mc.onb_span(vecs).dim == 2

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            mc.onb_span([np.eye(2), np.eye(3)])

    def test_orthonormal(self, rng):
        vecs = [rng.standard_normal((3, 2)) for _ in range(4)]
        s = mc.onb_span(vecs)
        assert s.dim == 4
        assert s.gram_error() < 1e-12

    def test_idempotent(self, rng):
        s = mc.onb_span([rng.standard_normal((2, 3)) for _ in range(3)])
        assert mc.subspace_equal(s, mc.onb_span(list(s.basis)), 1e-10)

    def test_scale_floor_discards_noise(self):
        noise = [1e-17 * np.ones((2, 2))]
        assert mc.onb_span(noise).dim == 1
        assert mc.onb_span(noise, scale=1.0).dim == 0


class TestSubspaceEqual:
    def test_scaling(self):
        assert mc.subspace_equal(mc.onb_span([unit(2, 0, 0)]), mc.onb_span([2 * unit(2, 0, 0)]))

    def test_different(self):
        assert not mc.subspace_equal(mc.onb_span([unit(2, 0, 0)]), mc.onb_span([unit(2, 1, 1)]))

    def test_rotated_basis(self):
        e, f = unit(2, 0, 0), unit(2, 1, 1)
        u, v = mc.onb_span([e + f, e - f]), mc.onb_span([e, f])
        assert max(u.residual(x) for x in v.basis) < 1e-12
        assert mc.subspace_equal(u, v)


class TestKron:
    def test_identities(self):
        np.testing.assert_array_equal(mc.kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_zero(self):
        assert not np.any(mc.kron(np.zeros((1, 1)), np.ones((3, 2))))

    def test_units(self):
        # direct index computation: (a (x) b)[i*2 + k, j*2 + l] = a[i, j] b[k, l]
        np.testing.assert_array_equal(mc.kron(unit(2, 0, 0), unit(2, 0, 0)), unit(4, 0, 0))

    def test_associative(self, rng):
        a, b, c = (rng.standard_normal((2, 2)) for _ in range(3))
        np.testing.assert_allclose(mc.kron(mc.kron(a, b), c), mc.kron(a, mc.kron(b, c)))

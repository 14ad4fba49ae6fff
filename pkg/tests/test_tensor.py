import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitmps.errors import DimensionError
from splitmps.tensor import contract, qr_orthogonalize, svd, truncation_rank


class TestContract:
    def test_identity_contraction(self):
        v = np.array([1.0, 2.0, 3.0])
        out = contract(np.eye(3), v, [(1, 0)])
        np.testing.assert_allclose(out, v)

    def test_inverse_gives_identity(self, rng):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        out = contract(m, np.linalg.inv(m), [(1, 0)])
        np.testing.assert_allclose(out, np.eye(4), atol=1e-12)

    def test_matrix_chain_associative(self, rng):
        a, b, c = (rng.standard_normal((5, 5)) for _ in range(3))
        left = contract(contract(a, b, [(1, 0)]), c, [(1, 0)])
        right = contract(a, contract(b, c, [(1, 0)]), [(1, 0)])
        np.testing.assert_allclose(left, right, atol=1e-13)

    def test_extent_mismatch_raises(self):
        with pytest.raises(DimensionError):
            contract(np.ones((2, 3)), np.ones((4, 2)), [(1, 0)])

    def test_result_leg_order(self, rng):
        a = rng.standard_normal((2, 3, 4))
        b = rng.standard_normal((3, 5))
        out = contract(a, b, [(1, 0)])
        assert out.shape == (2, 4, 5)

    @given(seed=st.integers(0, 2**31), alpha=st.floats(-3, 3))
    @settings(max_examples=25, deadline=None)
    def test_bilinearity(self, seed, alpha):
        r = np.random.default_rng(seed)
        a = r.standard_normal((3, 4)) + 1j * r.standard_normal((3, 4))
        b = r.standard_normal((3, 4))
        c = r.standard_normal((4, 2))
        lhs = contract(alpha * a + b, c, [(1, 0)])
        rhs = alpha * contract(a, c, [(1, 0)]) + contract(b, c, [(1, 0)])
        np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha)))


class TestSvd:
    def test_diagonal_matrix(self):
        res = svd(np.diag([3.0, 2.0, 1.0]), [0], [1], threshold=0.0)
        np.testing.assert_allclose(res.singular_values, [3.0, 2.0, 1.0])

    def test_rank_one_outer_product(self, rng):
        u = rng.standard_normal(6)
        v = rng.standard_normal(5)
        res = svd(np.outer(u, v), [0], [1], threshold=0.0)
        s = res.singular_values
        assert np.count_nonzero(s >= 1e-12 * s[0]) == 1

    def test_full_rank_reconstruction(self, rng):
        m = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
        res = svd(m, [0], [1], threshold=0.0)
        rec = (res.u * res.singular_values) @ res.v
        assert np.linalg.norm(rec - m) <= 1e-12 * np.linalg.norm(m)
        assert res.discarded_weight == 0.0

    def test_truncation_discarded_weight(self, rng):
        m = rng.standard_normal((8, 8))
        res = svd(m, [0], [1], max_rank=3)
        rec = (res.u * res.singular_values) @ res.v
        np.testing.assert_allclose(np.linalg.norm(rec - m) ** 2, res.discarded_weight, rtol=1e-10)

    def test_isometries(self, rng):
        m = rng.standard_normal((2, 3, 4, 5)) + 1j * rng.standard_normal((2, 3, 4, 5))
        res = svd(m, [0, 2], [1, 3], threshold=0.0)
        u = res.u.reshape(-1, res.rank)
        v = res.v.reshape(res.rank, -1)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(res.rank), atol=1e-12)
        np.testing.assert_allclose(v @ v.conj().T, np.eye(res.rank), atol=1e-12)

    def test_descending_nonnegative(self, rng):
        res = svd(rng.standard_normal((10, 7)), [0], [1], threshold=0.0)
        s = res.singular_values
        assert np.all(s >= 0) and np.all(np.diff(s) <= 0)

    def test_empty_raises(self):
        with pytest.raises(DimensionError):
            svd(np.zeros((0, 3)), [0], [1])

    def test_bad_bipartition_raises(self):
        with pytest.raises(DimensionError):
            svd(np.ones((2, 2, 2)), [0], [1])

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_reconstruction_within_discarded_weight(self, seed):
        r = np.random.default_rng(seed)
        dims = r.integers(1, 5, size=3)
        t = r.standard_normal(tuple(dims)) + 1j * r.standard_normal(tuple(dims))
        res = svd(t, [0, 1], [2], max_rank=2)
        rec = np.tensordot(res.u * res.singular_values, res.v, (2, 0))
        err2 = np.linalg.norm(rec - t) ** 2
        assert err2 <= res.discarded_weight * (1 + 1e-9) + 1e-12


class TestTruncationRank:
    def test_threshold_and_max_rank(self):
        s = np.array([1.0, 0.5, 1e-8, 1e-15])
        assert truncation_rank(s, None, 0.0) == 4
        assert truncation_rank(s, None, 1e-12) == 3
        assert truncation_rank(s, 2, 1e-12) == 2
        assert truncation_rank(s, None, 10.0) == 1  # always keeps one


class TestQr:
    def test_random_tall_matrix_isometric(self, rng):
        q, _ = qr_orthogonalize(rng.standard_normal((8, 3)), [0], [1])
        np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-13)

    def test_reconstruction(self, rng):
        t = rng.standard_normal((3, 4, 5)) + 1j * rng.standard_normal((3, 4, 5))
        q, r = qr_orthogonalize(t, [0, 1], [2])
        rec = np.tensordot(q, r, (2, 0))
        assert np.linalg.norm(rec - t) <= 1e-12 * np.linalg.norm(t)

    def test_isometric_input_unit_diagonal(self, rng):
        m, _ = np.linalg.qr(rng.standard_normal((6, 4)))
        _, r = qr_orthogonalize(m, [0], [1])
        np.testing.assert_allclose(np.abs(np.diag(r)), np.ones(4), atol=1e-12)

    def test_zero_tensor_raises(self):
        with pytest.raises(DimensionError):
            qr_orthogonalize(np.zeros((4, 2)), [0], [1])


class TestLayout:
    """Row-major reshape/permute round trips are exact by construction."""

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_reshape_roundtrip_bit_identical(self, seed):
        r = np.random.default_rng(seed)
        t = r.standard_normal((2, 6, 4))
        back = t.reshape(2, 2, 3, 4).reshape(2, 6, 4)
        assert np.array_equal(back, t)

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_permute_roundtrip_bit_identical(self, seed):
        r = np.random.default_rng(seed)
        t = r.standard_normal((2, 3, 4, 5))
        perm = list(r.permutation(4))
        inv = np.argsort(perm)
        assert np.array_equal(t.transpose(perm).transpose(inv), t)

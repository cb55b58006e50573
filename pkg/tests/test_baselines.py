import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import assert_contract
from sparselae.baselines import as_symmetric, deflate, sparse_components_deflation, tpower, truncate_top
from sparselae.cssp import SelectionStrategy
from sparselae.encoder import batch_encoder, information_loss
from sparselae.errors import InvalidArgumentError, InvalidInputError


def random_psd(rng, n, rank=None):
    B = rng.standard_normal((n, rank or n))
    return B @ B.T


def best_support_eigenvalue(A, r):
    """Largest top eigenvalue over all r x r principal submatrices."""
    n = A.shape[0]
    return max(np.linalg.eigvalsh(A[np.ix_(S, S)])[-1] for S in itertools.combinations(range(n), r))


class TestTruncateTop:
    def test_ties_prefer_smaller_index(self):
        np.testing.assert_array_equal(truncate_top(np.array([1.0, -1.0, 1.0]), 2), [1.0, -1.0, 0.0])

    def test_magnitude(self):
        np.testing.assert_array_equal(truncate_top(np.array([0.1, -3.0, 2.0]), 1), [0.0, -3.0, 0.0])


class TestTPower:
    def test_diag_r1(self):
        for seed in range(10):
            v = tpower(np.diag([3.0, 2.0, 1.0]), 1, seed=seed).vector
            np.testing.assert_allclose(np.abs(v), [1.0, 0.0, 0.0])

    def test_diag_r2(self):
        res = tpower(np.diag([3.0, 2.0, 1.0]), 2, seed=0)
        assert set(np.flatnonzero(res.vector)) <= {0, 1}
        assert abs(res.vector[0]) > 0.999
        assert res.converged

    @pytest.mark.parametrize("seed", range(5))
    def test_brute_force_support(self, seed):
        # on 10 matrices, at least 8 reach 90% of the best principal-submatrix eigenvalue
        hits = 0
        for m in range(10):
            rng = np.random.default_rng(1000 * seed + m)
            A = random_psd(rng, 8)
            v = tpower(A, 3, seed=m).vector
            hits += float(v @ A @ v) >= 0.9 * best_support_eigenvalue(A, 3)
        assert hits >= 8

    def test_zero_matrix(self):
        res = tpower(np.zeros((3, 3)), 2)
        assert res.degenerate
        np.testing.assert_array_equal(res.vector, [1.0, 0.0, 0.0])

    def test_not_symmetric(self):
        with pytest.raises(InvalidInputError):
            tpower(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
        with pytest.raises(InvalidInputError):
            as_symmetric(np.ones((2, 3)))

    def test_r_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            tpower(np.eye(3), 4)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 9))
    def test_unit_norm_and_sparse(self, seed, n):
        rng = np.random.default_rng(seed)
        A = random_psd(rng, n)
        r = int(rng.integers(1, n + 1))
        v = tpower(A, r, seed=seed).vector
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-12
        assert np.count_nonzero(v) <= r

    def test_full_support_top_eigenvector(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        A = Q @ np.diag([5.0, 2.0, 1.0, 0.5, 0.2, 0.1]) @ Q.T
        v = tpower(A, 6, seed=3).vector
        cos = abs(float(v @ Q[:, 0]))
        assert np.arccos(min(cos, 1.0)) <= 1e-6


class TestDeflate:
    def test_identity(self):
        np.testing.assert_allclose(deflate(np.eye(4), np.array([1.0, 0, 0, 0])), np.diag([0.0, 1, 1, 1]))

    def test_idempotent(self, rng):
        A = random_psd(rng, 5)
        h = rng.standard_normal(5)
        h /= np.linalg.norm(h)
        once = deflate(A, h)
        np.testing.assert_allclose(deflate(once, h), once, atol=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 10))
    def test_annihilates_and_keeps_psd(self, seed, n):
        rng = np.random.default_rng(seed)
        A = random_psd(rng, n)
        h = rng.standard_normal(n)
        h /= np.linalg.norm(h)
        out = deflate(A, h)
        scale = max(1.0, float(np.max(np.abs(A))))
        np.testing.assert_array_equal(out, out.T)
        assert np.linalg.norm(out @ h) <= 1e-8 * scale
        assert abs(h @ out @ h) <= 1e-8 * scale
        assert np.linalg.eigvalsh(out)[0] >= -1e-8 * scale


class TestSparseComponents:
    def test_diag(self):
        enc = sparse_components_deflation(np.diag([4.0, 3.0, 2.0, 1.0]), 2, 1)
        np.testing.assert_allclose(np.abs(enc.H), [[1, 0], [0, 1], [0, 0], [0, 0]])
        assert_contract(enc)

    def test_k1_matches_tpower(self, rng):
        A = random_psd(rng, 6)
        enc = sparse_components_deflation(A, 1, 3, seed=5)
        np.testing.assert_array_equal(enc.H[:, 0], tpower(A, 3, seed=5).vector)

    def test_unit_columns_within_budget(self, rng):
        A = random_psd(rng, 10)
        enc = sparse_components_deflation(A, 3, 4, seed=1)
        np.testing.assert_allclose(np.linalg.norm(enc.H, axis=0), 1.0, atol=1e-12)
        assert all(n <= 4 for n in enc.column_nnz())
        assert_contract(enc)

    def test_comparison_is_recorded_only(self, rng):
        # neither method dominates per instance; only check both values are finite
        A = random_psd(rng, 10)
        theirs = information_loss(A, sparse_components_deflation(A, 2, 3, seed=0))
        ours = information_loss(A, batch_encoder(A, 2, 3, SelectionStrategy("greedy"))[0])
        assert np.isfinite(theirs) and np.isfinite(ours)

    def test_k_too_large(self):
        with pytest.raises(InvalidArgumentError):
            sparse_components_deflation(np.eye(2), 3, 1)

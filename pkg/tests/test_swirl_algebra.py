import warnings

import numpy as np
import pytest

from swirlmat.ensembles import build_circulant_toeplitz, build_exchange
from swirlmat.matrix_core import sym_eigenvalues
from swirlmat.swirl_algebra import (
    Identity,
    TraceIdentityReport,
    block_antidiagonal,
    is_permutation_matrix,
    iterated_swirl,
    nontrivial_count,
    swirl,
    verify_iterated_trace_identity,
    verify_trace_identity,
    verify_transpose_identity,
)

I2 = np.eye(2)
J2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def random_permutation(rng, n):
    return np.eye(n)[rng.permutation(n)]


class TestSwirl:
    def test_identity_exchange(self):
        s = swirl(I2, J2)
        assert s.matrix == [[0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]]
        assert s.n == 2

    def test_scalar(self):
        assert swirl([[3.5]], [[1.0]]).matrix == [[3.5, 3.5], [3.5, 3.5]]

    def test_mismatch(self):
        with pytest.raises(ValueError):
            swirl(np.eye(2), np.eye(3))

    def test_blocks(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 17))
            a = rng.standard_normal((n, n))
            x = rng.standard_normal((n, n))
            s = swirl(a, x)
            assert np.array_equal(s.block(0, 0), a @ x)
            assert np.array_equal(s.block(0, 1), a)
            assert np.array_equal(s.block(1, 0), (x @ a) @ x)
            assert np.array_equal(s.block(1, 1), x @ a)

    @pytest.mark.parametrize("n", [1, 2, 3, 6, 9])
    def test_toeplitz_swirl_centrosymmetric_and_symmetric(self, rng, n):
        m = swirl(build_circulant_toeplitz(rng.standard_normal(n)), build_exchange(n)).matrix.data
        assert np.array_equal(m, m[::-1, ::-1])
        assert np.array_equal(m, m.T)


class TestIteratedSwirl:
    def test_base_case(self, rng):
        a = rng.standard_normal((4, 4))
        j = build_exchange(4)
        assert iterated_swirl(a, j, 1) == swirl(a, j).matrix

    def test_block_antidiagonal(self):
        xr = block_antidiagonal(J2, 2)
        assert xr.shape == (4, 4)
        assert np.array_equal(xr[:2, 2:], J2) and np.array_equal(xr[2:, :2], J2)
        assert np.array_equal(xr[:2, :2], np.zeros((2, 2)))

    def test_tiling_identity_exchange(self):
        base = swirl(I2, J2).matrix.data
        assert iterated_swirl(I2, J2, 2) == np.tile(base, (2, 2))

    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_tiling_general(self, rng, ell):
        # each of the 4^(ell-1) blocks is a copy of sw(A, X) for involutions X
        n = 3
        a = rng.standard_normal((n, n))
        swap02 = np.eye(n)[[2, 1, 0]]
        for x in [build_exchange(n).data, np.eye(n), np.diag([1.0, -1.0, 1.0]), swap02]:
            reps = 2 ** (ell - 1)
            assert iterated_swirl(a, x, ell) == np.tile(swirl(a, x).matrix.data, (reps, reps))

    def test_rejects_non_involution(self):
        with pytest.raises(ValueError):
            iterated_swirl(np.eye(2), [[1.0, 1.0], [0.0, 1.0]], 2)
        with pytest.raises(ValueError):
            iterated_swirl(np.eye(2), J2, 0)

    @pytest.mark.parametrize("n", range(2, 9))
    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_trace(self, rng, n, ell):
        a = build_circulant_toeplitz(rng.standard_normal(n)).data
        j = build_exchange(n).data
        got = np.trace(iterated_swirl(a, j, ell).data)
        assert got == pytest.approx(2**ell * np.trace(a @ j), rel=1e-12, abs=1e-12)


class TestTraceIdentity:
    def test_golden_k2(self):
        r = verify_trace_identity(I2, J2, 2)
        assert (r.lhs, r.rhs) == (8, 8) and r.exact and r.passed

    def test_golden_k1(self):
        r = verify_trace_identity(I2, J2, 1)
        assert (r.lhs, r.rhs) == (0, 0) and r.passed

    @pytest.mark.parametrize("k", range(1, 7))
    def test_gaussian_toeplitz(self, rng, k):
        a = build_circulant_toeplitz(rng.standard_normal(8))
        r = verify_trace_identity(a, build_exchange(8), k)
        assert r.identity is Identity.SWIRL
        assert r.rel_err <= 1e-10 and r.passed
        # independent route: eigenvalue power sums of the symmetric swirl
        eigs = sym_eigenvalues(swirl(a, build_exchange(8)).matrix)
        assert np.sum(eigs**k) == pytest.approx(r.rhs, rel=1e-9, abs=1e-9)

    def test_general_x(self, rng):
        # the identity holds for any X, not only involutions
        for k in range(1, 6):
            a, x = rng.standard_normal((5, 5)), rng.standard_normal((5, 5))
            assert verify_trace_identity(a, x, k).passed

    def test_rel_err_definition(self, rng):
        r = verify_trace_identity(rng.standard_normal((4, 4)), rng.standard_normal((4, 4)), 3)
        assert r.rel_err == abs(r.lhs - r.rhs) / max(1.0, abs(r.rhs))
        assert TraceIdentityReport(Identity.SWIRL, 1, 1.0, 1.1, 0.1, 0.1 / 1.1, 2).passed is False

    def test_invalid(self):
        with pytest.raises(ValueError):
            verify_trace_identity(I2, J2, 0)
        with pytest.raises(ValueError):
            verify_trace_identity(I2, np.eye(3), 1)

    def test_integer_path_large_k(self):
        # integer inputs beyond the int64 budget fall back to floats without overflow
        a = np.full((4, 4), 1000.0)
        r = verify_trace_identity(a, build_exchange(4), 12)
        assert not r.exact and r.passed


class TestIteratedIdentity:
    def test_golden(self):
        r = verify_iterated_trace_identity(I2, J2, 2, 2)
        assert r.rhs == 32 and r.lhs == 32 and r.passed

    def test_ell1_matches_plain(self, rng):
        a = rng.standard_normal((5, 5))
        j = build_exchange(5)
        for k in range(1, 5):
            plain = verify_trace_identity(a, j, k)
            it = verify_iterated_trace_identity(a, j, k, 1)
            assert it.lhs == pytest.approx(plain.lhs, rel=1e-12) and it.rhs == pytest.approx(plain.rhs, rel=1e-12)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_k1(self, rng, ell):
        a = rng.standard_normal((6, 6))
        j = build_exchange(6).data
        r = verify_iterated_trace_identity(a, j, 1, ell)
        assert r.lhs == pytest.approx(2**ell * np.trace(a @ j), rel=1e-12)

    def test_rejects_non_involution(self):
        with pytest.raises(ValueError):
            verify_iterated_trace_identity(np.eye(2), np.diag([2.0, 1.0]), 2, 2)


class TestTransposeIdentity:
    def test_golden(self):
        r = verify_transpose_identity(I2, J2, 1)
        assert (r.lhs, r.rhs) == (8, 8)

    def test_frobenius(self, rng):
        a = rng.standard_normal((5, 5))
        r = verify_transpose_identity(a, random_permutation(rng, 5), 1)
        assert r.rhs == pytest.approx(4 * np.sum(a**2), rel=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_random_permutations(self, rng, k):
        a = rng.standard_normal((8, 8))
        r = verify_transpose_identity(a, random_permutation(rng, 8), k)
        assert r.rel_err <= 1e-10
        # singular values route
        sv = np.linalg.svd(swirl(a, random_permutation(rng, 8)).matrix.data, compute_uv=False)
        assert np.sum(sv ** (2 * k)) == pytest.approx(r.rhs, rel=1e-9)

    def test_rejects_non_permutation(self, rng):
        assert not is_permutation_matrix(np.full((2, 2), 0.5))
        assert not is_permutation_matrix(np.eye(2) * 2)
        with pytest.raises(ValueError):
            verify_transpose_identity(np.eye(2), np.full((2, 2), 0.5), 1)


class TestSpectrum:
    @pytest.mark.parametrize("n", [2, 5, 16, 33, 64])
    def test_zero_eigenvalues_and_doubling(self, rng, n):
        a = build_circulant_toeplitz(rng.standard_normal(n)).data
        j = build_exchange(n).data
        s = swirl(a, j).matrix.data
        eigs = sym_eigenvalues(s)
        scale = np.linalg.norm(s, 2)
        order = np.argsort(np.abs(eigs))
        assert np.all(np.abs(eigs[order[:n]]) <= 1e-8 * scale)
        nonzero = np.sort(eigs[order[n:]])
        np.testing.assert_allclose(nonzero, np.sort(2 * sym_eigenvalues(a @ j)), atol=1e-8 * scale)

    def test_bottom_rows_repeat_top(self, rng):
        a = rng.standard_normal((6, 6))
        j = build_exchange(6).data
        s = swirl(a, j).matrix.data
        assert np.array_equal(s[6:], s[:6][::-1])

    @pytest.mark.parametrize("ell", [2, 3])
    def test_scaled_moment_independent_of_ell(self, rng, ell):
        n = 6
        a = build_circulant_toeplitz(rng.standard_normal(n)).data
        j = build_exchange(n).data
        base = sym_eigenvalues(swirl(a, j).matrix)
        it = sym_eigenvalues(iterated_swirl(a, j, ell))
        for k in range(1, 7):
            m1 = n ** (k / 2 - 1) / (2 * n) ** k * np.sum(base**k)
            m2 = n ** (k / 2 - 1) / (n * 2**ell) ** k * np.sum(it**k)
            assert m2 == pytest.approx(m1, rel=1e-8, abs=1e-8)

    def test_nontrivial_count(self, rng):
        a = rng.standard_normal((5, 5))
        assert nontrivial_count(a, build_exchange(5)) == 5
        assert nontrivial_count(a, build_exchange(5), ell=3) == 5
        with pytest.warns(RuntimeWarning):
            assert nontrivial_count(a, np.eye(5)) == 5
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            nontrivial_count(a, build_exchange(5))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swirlmat.ensembles import build_circulant_hankel, build_exchange
from swirlmat.matrix_core import (
    DenseMatrix,
    EigenSolverError,
    IntMatrix,
    NonSymmetricError,
    exact_nullity,
    exact_rank,
    jacobi_eigenvalues,
    mat_mul,
    mat_power,
    sym_eigenvalues,
    trace_power,
)

from conftest import rational_rank


def test_dense_matrix_validation():
    with pytest.raises(ValueError):
        DenseMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        DenseMatrix([[np.nan]])
    with pytest.raises(ValueError):
        DenseMatrix([[np.inf, 0], [0, 1]])
    m = DenseMatrix([[1, 2], [3, 4]], label="x")
    assert m.n == 2 and m.label == "x"
    with pytest.raises(ValueError):
        m.data[0, 0] = 5


def test_dense_matrix_csv_roundtrip(tmp_path, rng):
    m = DenseMatrix(rng.standard_normal((5, 5)), label="gaussian")
    m.to_csv(tmp_path / "m.csv")
    back = DenseMatrix.from_csv(tmp_path / "m.csv")
    assert back == m
    assert back.label == "gaussian"


class TestMatMul:
    def test_identity_times_exchange(self):
        assert mat_mul(np.eye(2), build_exchange(2)) == build_exchange(2)

    def test_exchange_involution(self):
        assert mat_mul(build_exchange(2), build_exchange(2)) == np.eye(2)

    def test_hand_product(self):
        assert mat_mul([[1, 1], [0, 1]], [[1, 0], [1, 1]]) == [[2, 1], [1, 1]]

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mat_mul(np.eye(2), np.eye(3))

    def test_operator(self):
        j = build_exchange(3)
        assert (j @ j) == np.eye(3)

    @given(st.lists(st.integers(-9, 9), min_size=48, max_size=48))
    def test_associative_on_integers(self, vals):
        a, b, c = (np.array(vals[16 * i:16 * (i + 1)], dtype=float).reshape(4, 4) for i in range(3))
        assert mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c))


def test_mat_power_and_trace():
    m = np.array([[1, 1], [1, 0]], dtype=np.int64)
    assert mat_power(m, 10).tolist() == [[89, 55], [55, 34]]
    assert trace_power(np.eye(3), 5) == 3.0
    assert mat_power(m, 0).tolist() == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        mat_power(m, -1)


class TestSymEigenvalues:
    def test_diagonal(self):
        assert sym_eigenvalues(np.diag([3.0, 1.0, 2.0])).tolist() == [1.0, 2.0, 3.0]

    def test_exchange(self):
        np.testing.assert_allclose(sym_eigenvalues(build_exchange(2)), [-1, 1], atol=1e-15)

    def test_indicator_hankel(self):
        h = build_circulant_hankel([1, 0, 0])
        assert h == [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
        # char poly (1 - x)(x^2 - 1)
        np.testing.assert_allclose(sym_eigenvalues(h), [-1, 1, 1], atol=1e-14)

    def test_rejects_asymmetric(self):
        with pytest.raises(NonSymmetricError):
            sym_eigenvalues([[0, 1], [0, 0]])

    def test_tolerance_guard(self):
        a = np.array([[1.0, 1.0], [1.0 + 1e-13, 1.0]])
        sym_eigenvalues(a)
        with pytest.raises(NonSymmetricError):
            sym_eigenvalues(a, tol=1e-15)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            sym_eigenvalues(np.eye(2), method="qr")

    @pytest.mark.parametrize("n", [1, 2, 5, 17, 32])
    def test_power_sums_match_trace(self, rng, n):
        g = rng.standard_normal((n, n))
        m = g + g.T
        eigs = sym_eigenvalues(m)
        norm = np.linalg.norm(m, 2)
        for k in range(1, 5):
            assert abs(np.sum(eigs**k) - trace_power(m, k)) <= 1e-8 * n * max(norm, 1) ** k

    @pytest.mark.parametrize("n", [2, 6, 12, 24])
    def test_jacobi_agrees_with_lapack(self, rng, n):
        g = rng.standard_normal((n, n))
        m = g + g.T
        np.testing.assert_allclose(sym_eigenvalues(m, method="jacobi"), sym_eigenvalues(m), atol=1e-10)

    def test_jacobi_handles_repeated_eigenvalues(self):
        np.testing.assert_allclose(jacobi_eigenvalues(build_circulant_hankel([1, 0, 0])), [-1, 1, 1], atol=1e-14)

    def test_jacobi_sweep_cap(self, rng):
        g = rng.standard_normal((6, 6))
        with pytest.raises(EigenSolverError):
            jacobi_eigenvalues(g + g.T, max_sweeps=1)


class TestExactNullity:
    def test_identity(self):
        assert exact_nullity(IntMatrix.from_rows(np.eye(4, dtype=int).tolist())) == 0

    def test_all_matched_system(self):
        m = [[1, 1, -1, -1], [0, 1, 0, -1], [-1, 0, 1, 0], [0, -1, 0, 1]]
        assert exact_nullity(IntMatrix.from_rows(m)) == 2

    def test_zero(self):
        assert exact_nullity(IntMatrix.zeros(3, 3)) == 3

    def test_empty_returns_cols(self):
        assert exact_nullity(IntMatrix(0, 3, ())) == 3

    def test_large_entries_stay_exact(self):
        big = 10**30
        m = [[big, big + 1], [big - 1, big]]
        assert exact_rank(m) == 2
        assert exact_rank([[big, 2 * big], [3 * big, 6 * big]]) == 1

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 8), st.data())
    def test_matches_rational_oracle(self, rows, cols, data):
        entries = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=rows * cols, max_size=rows * cols))
        m = [entries[r * cols:(r + 1) * cols] for r in range(rows)]
        rank = exact_rank(m)
        assert rank == rational_rank(m)
        assert exact_nullity(IntMatrix.from_rows(m)) + rank == cols

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 7), st.integers(1, 7), st.data())
    def test_rank_deficient_oracle(self, rows, cols, data):
        # low-rank products exercise skipped pivot columns
        inner = data.draw(st.integers(1, 3))
        u = data.draw(st.lists(st.integers(-3, 3), min_size=rows * inner, max_size=rows * inner))
        v = data.draw(st.lists(st.integers(-3, 3), min_size=inner * cols, max_size=inner * cols))
        m = (np.array(u).reshape(rows, inner) @ np.array(v).reshape(inner, cols)).tolist()
        assert exact_rank(m) == rational_rank(m)

"""The swirl block operation, its iterates, and checks of the trace identities.

``sw(A, X)`` is the 2N x 2N block matrix ``[[AX, A], [XAX, XA]]``. For any
A and X:

    tr(sw(A, X)^k) = 2^k tr((AX)^k)

and when ``X @ X == I`` the k-th power trace of the l-fold iterate picks up a
factor ``2^(k l)``. When X is a permutation matrix,
``tr((S S^T)^k) = 4^k tr((A A^T)^k)`` with ``S = sw(A, X)``.

Traces of powers are always computed by repeated multiplication, never from
eigenvalues, so these checks are independent of the eigensolver.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .matrix_core import DenseMatrix, as_array, mat_power

__all__ = [
    "SwirlResult",
    "Identity",
    "TraceIdentityReport",
    "PASS_REL_TOL",
    "swirl",
    "iterated_swirl",
    "block_antidiagonal",
    "verify_trace_identity",
    "verify_iterated_trace_identity",
    "verify_transpose_identity",
    "nontrivial_count",
]

PASS_REL_TOL = 1e-10
INVOLUTION_TOL = 1e-12
_INT64_BUDGET = 2**62


@dataclass(frozen=True)
class SwirlResult:
    matrix: DenseMatrix
    a_ref: str | None = None
    x_ref: str | None = None

    @property
    def n(self) -> int:
        """Size of the input blocks (half the output dimension)."""
        return self.matrix.n // 2

    def block(self, row: int, col: int) -> np.ndarray:
        n = self.n
        return self.matrix.data[row * n:(row + 1) * n, col * n:(col + 1) * n]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix.data, dtype=dtype)


class Identity(str, enum.Enum):
    SWIRL = "swirl"
    ITERATED_SWIRL = "iterated-swirl"
    TRANSPOSE_PRODUCT = "transpose-product"


@dataclass(frozen=True)
class TraceIdentityReport:
    identity: Identity
    k: int
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    n: int
    ell: int = 1
    exact: bool = False

    @property
    def passed(self) -> bool:
        if self.exact:
            return self.abs_err == 0
        return self.rel_err <= PASS_REL_TOL

    def to_dict(self) -> dict:
        return {
            "identity": self.identity.value,
            "n": self.n,
            "k": self.k,
            "ell": self.ell,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "exact": self.exact,
            "passed": self.passed,
        }


def _check_pair(a, x) -> tuple[np.ndarray, np.ndarray]:
    a, x = as_array(a), as_array(x)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got {a.shape}")
    if a.shape != x.shape:
        raise ValueError(f"dimension mismatch: A is {a.shape}, X is {x.shape}")
    return a, x


def _label(m) -> str | None:
    return m.label if isinstance(m, DenseMatrix) else None


def _swirl_array(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    ax = a @ x
    xa = x @ a
    return np.block([[ax, a], [xa @ x, xa]])


def swirl(a, x) -> SwirlResult:
    """``[[A X, A], [X A X, X A]]``."""
    arr_a, arr_x = _check_pair(a, x)
    return SwirlResult(DenseMatrix(_swirl_array(arr_a, arr_x), label="swirl"),
                       a_ref=_label(a), x_ref=_label(x))


def block_antidiagonal(x, copies: int) -> np.ndarray:
    """Block matrix with ``copies`` copies of ``x`` on the block anti-diagonal."""
    x = as_array(x)
    n = x.shape[0]
    out = np.zeros((n * copies, n * copies))
    for b in range(copies):
        r = b * n
        c = (copies - 1 - b) * n
        out[r:r + n, c:c + n] = x
    return out


def _require_involution(x: np.ndarray) -> None:
    err = float(np.max(np.abs(x @ x - np.eye(x.shape[0]))))
    if err > INVOLUTION_TOL:
        raise ValueError(f"X @ X differs from I by {err:.3e}; iterated identities need X^2 = I")


def iterated_swirl(a, x, ell: int) -> DenseMatrix:
    """``sw^ell(A, X)``: swirl against ``X_r`` (``2^(r-1)`` anti-diagonal X blocks) for r = 1..ell.

    Refuses X with ``X @ X != I``.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    arr_a, arr_x = _check_pair(a, x)
    _require_involution(arr_x)
    b = _swirl_array(arr_a, arr_x)
    for r in range(2, ell + 1):
        b = _swirl_array(b, block_antidiagonal(arr_x, 2 ** (r - 1)))
    return DenseMatrix(b, label=f"swirl^{ell}")


def _integer_arrays(mats, k: int):
    """int64 copies of ``mats`` when every entry is integral and ``k``-th powers cannot overflow."""
    if not all(np.all(m == np.round(m)) for m in mats):
        return None
    dim = max(m.shape[0] for m in mats)
    bound = max(float(np.max(np.abs(m))) for m in mats) * dim
    # |entries of M^k| <= (dim * max|m_ij|)^k; larger A products get one more factor
    if bound > 0 and (k + 2) * np.log2(max(bound, 1.0)) >= np.log2(_INT64_BUDGET):
        return None
    return [m.astype(np.int64) for m in mats]


def _trace_of_power(m: np.ndarray, k: int):
    p = mat_power(m, k)
    t = np.trace(p)
    return int(t) if np.issubdtype(p.dtype, np.integer) else float(t)


def _report(identity, k, lhs, rhs, n, ell=1, exact=False) -> TraceIdentityReport:
    abs_err = abs(lhs - rhs)
    return TraceIdentityReport(
        identity=identity, k=k, lhs=float(lhs), rhs=float(rhs),
        abs_err=float(abs_err), rel_err=float(abs_err / max(1.0, abs(rhs))),
        n=n, ell=ell, exact=exact,
    )


def verify_trace_identity(a, x, k: int) -> TraceIdentityReport:
    """Compare ``tr(sw(A, X)^k)`` with ``2^k tr((AX)^k)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    arr_a, arr_x = _check_pair(a, x)
    ints = _integer_arrays([arr_a, arr_x], k)
    if ints is not None:
        ia, ix = ints
        lhs = _trace_of_power(_swirl_array(ia, ix), k)
        rhs = 2**k * _trace_of_power(ia @ ix, k)
        return _report(Identity.SWIRL, k, lhs, rhs, arr_a.shape[0], exact=True)
    lhs = _trace_of_power(_swirl_array(arr_a, arr_x), k)
    rhs = 2.0**k * _trace_of_power(arr_a @ arr_x, k)
    return _report(Identity.SWIRL, k, lhs, rhs, arr_a.shape[0])


def verify_iterated_trace_identity(a, x, k: int, ell: int) -> TraceIdentityReport:
    """Compare ``tr(sw^ell(A, X)^k)`` with ``2^(k ell) tr((AX)^k)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    arr_a, arr_x = _check_pair(a, x)
    big = iterated_swirl(arr_a, arr_x, ell).data
    ints = _integer_arrays([big, arr_a @ arr_x], k)
    if ints is not None:
        ib, iax = ints
        lhs = _trace_of_power(ib, k)
        rhs = 2 ** (k * ell) * _trace_of_power(iax, k)
        return _report(Identity.ITERATED_SWIRL, k, lhs, rhs, arr_a.shape[0], ell, exact=True)
    lhs = _trace_of_power(big, k)
    rhs = 2.0 ** (k * ell) * _trace_of_power(arr_a @ arr_x, k)
    return _report(Identity.ITERATED_SWIRL, k, lhs, rhs, arr_a.shape[0], ell)


def is_permutation_matrix(x) -> bool:
    x = as_array(x)
    if not np.all((x == 0) | (x == 1)):
        return False
    return bool(np.all(x.sum(axis=0) == 1) and np.all(x.sum(axis=1) == 1))


def verify_transpose_identity(a, x, k: int) -> TraceIdentityReport:
    """Compare ``tr((S S^T)^k)`` with ``4^k tr((A A^T)^k)`` for ``S = sw(A, X)``, X a permutation."""
    if k < 1:
        raise ValueError("k must be >= 1")
    arr_a, arr_x = _check_pair(a, x)
    if not is_permutation_matrix(arr_x):
        raise ValueError("X must be a permutation matrix")
    s = _swirl_array(arr_a, arr_x)
    ints = _integer_arrays([s @ s.T, arr_a @ arr_a.T], k)
    if ints is not None:
        iss, iaa = ints
        lhs = _trace_of_power(iss, k)
        rhs = 4**k * _trace_of_power(iaa, k)
        return _report(Identity.TRANSPOSE_PRODUCT, k, lhs, rhs, arr_a.shape[0], exact=True)
    lhs = _trace_of_power(s @ s.T, k)
    rhs = 4.0**k * _trace_of_power(arr_a @ arr_a.T, k)
    return _report(Identity.TRANSPOSE_PRODUCT, k, lhs, rhs, arr_a.shape[0])


def nontrivial_count(a, x, ell: int = 1, rtol: float = 1e-8) -> int:
    """Number of eigenvalues of ``sw^ell(A, X)`` that are not trivially zero.

    For the exchange matrix the bottom block row of ``sw(A, J)`` repeats the top
    one with rows reversed, so the count is N. For any other X the count is
    estimated as the numerical rank, with a warning, since nothing guarantees
    it is fixed across an ensemble.
    """
    arr_a, arr_x = _check_pair(a, x)
    n = arr_a.shape[0]
    if np.array_equal(arr_x, np.eye(n)[::-1]):
        return n
    warnings.warn("nontrivial eigenvalue count for X != J is a numerical rank estimate",
                  RuntimeWarning, stacklevel=2)
    m = iterated_swirl(arr_a, arr_x, ell).data if ell > 1 else _swirl_array(arr_a, arr_x)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > rtol * max(sv[0], 1e-300)))

"""Dense real and exact integer matrix kernels.

Real matrices are thin wrappers around ``numpy`` arrays; eigenvalues come from
LAPACK (``eigvalsh``) by default, with a cyclic Jacobi solver available as an
independent route. Integer matrices keep Python ints so that rank and nullity
are computed without any rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DenseMatrix",
    "IntMatrix",
    "NonSymmetricError",
    "EigenSolverError",
    "as_array",
    "mat_mul",
    "mat_power",
    "trace_power",
    "sym_eigenvalues",
    "jacobi_eigenvalues",
    "exact_rank",
    "exact_nullity",
]

JACOBI_MAX_SWEEPS = 100


class NonSymmetricError(ValueError):
    """Raised when a matrix expected to be symmetric is not."""


class EigenSolverError(ArithmeticError):
    """Raised when an eigensolver fails to converge."""


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Square real matrix with an optional descriptive label."""

    data: np.ndarray
    label: str | None = None

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise ValueError("matrix must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __eq__(self, other):
        if isinstance(other, DenseMatrix):
            other = other.data
        return np.array_equal(self.data, np.asarray(other))

    __hash__ = None

    def is_symmetric(self, tol: float | None = None) -> bool:
        if tol is None:
            tol = _default_sym_tol(self.data)
        return float(np.max(np.abs(self.data - self.data.T))) <= tol

    def to_csv(self, path) -> None:
        """Write row-major entries with full (17 significant digit) precision."""
        with open(path, "w", newline="") as fh:
            if self.label:
                fh.write(f"# {self.label}\n")
            for row in self.data:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def from_csv(cls, path, label: str | None = None) -> "DenseMatrix":
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    label = label or line[1:].strip()
                    continue
                rows.append([float(v) for v in line.split(",")])
        return cls(np.array(rows), label=label)


def as_array(m) -> np.ndarray:
    """Return the float array behind a DenseMatrix or array-like."""
    if isinstance(m, DenseMatrix):
        return m.data
    return np.asarray(m, dtype=float)


def _default_sym_tol(a: np.ndarray) -> float:
    norm = float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0
    return 1e-10 * max(norm, 1.0)


def mat_mul(a, b, label: str | None = None) -> DenseMatrix:
    a, b = as_array(a), as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return DenseMatrix(a @ b, label=label)


def mat_power(m, k: int) -> np.ndarray:
    """``m**k`` by repeated multiplication (no eigendecomposition).

    Works for float arrays as well as int64/object arrays, so exact integer
    paths can share it.
    """
    if k < 0:
        raise ValueError("power must be non-negative")
    a = m.data if isinstance(m, DenseMatrix) else np.asarray(m)
    result = np.eye(a.shape[0], dtype=a.dtype)
    for _ in range(k):
        result = result @ a
    return result


def trace_power(m, k: int):
    """``tr(m**k)`` via repeated multiplication."""
    p = mat_power(m, k)
    return sum(p[i, i] for i in range(p.shape[0])) if p.dtype == object else float(np.trace(p))


def sym_eigenvalues(m, tol: float | None = None, method: str = "lapack") -> np.ndarray:
    """Eigenvalues of a real symmetric matrix, ascending, ties kept.

    Parameters
    ----------
    m : DenseMatrix or array_like
        Square matrix; must be symmetric to within ``tol``.
    tol : float, optional
        Symmetry tolerance on ``max |m_ij - m_ji|``. Defaults to
        ``1e-10 * ||m||_inf``.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls :func:`numpy.linalg.eigvalsh`; ``"jacobi"`` runs
        :func:`jacobi_eigenvalues`.

    Raises
    ------
    NonSymmetricError
        If the asymmetry exceeds ``tol``.
    EigenSolverError
        If the solver does not converge.
    """
    a = as_array(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if tol is None:
        tol = _default_sym_tol(a)
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > tol:
        raise NonSymmetricError(f"matrix asymmetry {asym:.3e} exceeds tolerance {tol:.3e}")
    # symmetrize so round-off in user input cannot leak into the solver
    a = 0.5 * (a + a.T)
    if method == "lapack":
        try:
            eigs = np.linalg.eigvalsh(a)
        except np.linalg.LinAlgError as exc:
            raise EigenSolverError(str(exc)) from exc
    elif method == "jacobi":
        eigs = jacobi_eigenvalues(a)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    return np.sort(eigs)


def jacobi_eigenvalues(a, max_sweeps: int = JACOBI_MAX_SWEEPS, eps: float = 1e-15) -> np.ndarray:
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Each sweep annihilates every off-diagonal pair (p, q) once with a plane
    rotation. Iteration stops when the off-diagonal Frobenius norm drops below
    ``eps`` times the total Frobenius norm.
    """
    a = np.array(as_array(a), dtype=float)
    n = a.shape[0]
    total = np.linalg.norm(a)
    if n == 1 or total == 0.0:
        return np.sort(np.diag(a).copy())
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= eps * total:
            return np.sort(np.diag(a).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
    raise EigenSolverError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


@dataclass(frozen=True)
class IntMatrix:
    """Exact integer matrix stored as a tuple of rows of Python ints."""

    rows: int
    cols: int
    data: tuple = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("dimensions must be non-negative")
        data = tuple(tuple(int(v) for v in row) for row in self.data)
        if len(data) != self.rows or any(len(row) != self.cols for row in data):
            raise ValueError("data does not match declared dimensions")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    def to_numpy(self) -> np.ndarray:
        return np.array(self.data, dtype=object).reshape(self.rows, self.cols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def rank(self) -> int:
        return exact_rank(self)

    def nullity(self) -> int:
        return exact_nullity(self)


def _int_rows(m) -> list[list[int]]:
    if isinstance(m, IntMatrix):
        return m.tolist()
    return [[int(v) for v in row] for row in m]


def exact_rank(m) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination.

    Every intermediate entry is a minor of the input, so the integer division
    at each step is exact; Python ints keep the arithmetic overflow-free.
    """
    a = _int_rows(m)
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    rank = 0
    prev = 1
    for c in range(ncols):
        if rank == nrows:
            break
        pivot = next((i for i in range(rank, nrows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][c]
        prow = a[rank]
        for i in range(rank + 1, nrows):
            row = a[i]
            f = row[c]
            for j in range(c + 1, ncols):
                row[j] = (row[j] * p - f * prow[j]) // prev
            row[c] = 0
        prev = p
        rank += 1
    return rank


def exact_nullity(m) -> int:
    """Nullity ``cols - rank`` over the rationals; an empty matrix returns cols."""
    if isinstance(m, IntMatrix):
        cols = m.cols
    else:
        rows = list(m)
        m = rows
        cols = len(rows[0]) if rows else 0
    return cols - exact_rank(m)

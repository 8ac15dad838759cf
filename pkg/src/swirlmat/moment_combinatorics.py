"""Limiting circulant Hankel moments from pair matchings and exact nullities.

Write ``tr(H^{2k})`` as a sum over index tuples ``(i_1, ..., i_{2k})`` of
products of entries ``h(i_j, i_{j+1})``, whose value depends only on
``i_j + i_{j+1} (mod N)``. A matching of the 2k factors into pairs forces one
linear congruence per pair; the nullity of that k x 2k system counts the free
indices. Only matchings reaching nullity ``k + 1`` survive the
``N^{k+1}`` normalization, and each contributes exactly 1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterator, Sequence

import numpy as np

from .matrix_core import IntMatrix, exact_nullity

__all__ = [
    "Matching",
    "EquationSystem",
    "MATCHING_K_CAP",
    "ODD_EVEN_K_CAP",
    "ORACLE_BUDGET",
    "double_factorial",
    "enumerate_matchings",
    "equation_matrix",
    "matching_nullity",
    "limit_even_moment",
    "count_odd_even_matchings",
    "partition_audit",
    "build_B",
    "m_pi",
    "finite_N_expected_trace",
    "finite_N_moment",
]

MATCHING_K_CAP = 6
ODD_EVEN_K_CAP = 8
ORACLE_BUDGET = 10**8


def double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True)
class Matching:
    """Perfect matching of positions ``1..2k``; pairs stored sorted as ``(a, b)`` with ``a < b``."""

    k: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        flat = sorted(x for p in pairs for x in p)
        if len(pairs) != self.k or flat != list(range(1, 2 * self.k + 1)):
            raise ValueError(f"not a perfect matching of 1..{2 * self.k}: {self.pairs}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def odd_even(self) -> bool:
        """Every pair joins an odd position to an even one."""
        return all((a + b) % 2 == 1 for a, b in self.pairs)

    def involution(self) -> tuple[int, ...]:
        """0-based permutation swapping the two members of every pair."""
        perm = list(range(2 * self.k))
        for a, b in self.pairs:
            perm[a - 1], perm[b - 1] = b - 1, a - 1
        return tuple(perm)

    def __str__(self) -> str:
        return " ".join(f"({a},{b})" for a, b in self.pairs)


@dataclass(frozen=True)
class EquationSystem:
    matching: Matching
    matrix: IntMatrix

    @property
    def n_cols(self) -> int:
        return 2 * self.matching.k

    def nullity(self) -> int:
        return exact_nullity(self.matrix)


def _check_k(k: int, cap: int) -> None:
    if not 1 <= k <= cap:
        raise ValueError(f"k must be in 1..{cap}, got {k}")


def _matchings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield [(first, partner)] + tail


def enumerate_matchings(k: int) -> Iterator[Matching]:
    """All ``(2k-1)!!`` matchings; the smallest unmatched position is paired first."""
    _check_k(k, MATCHING_K_CAP)
    for pairs in _matchings(list(range(1, 2 * k + 1))):
        yield Matching(k, tuple(pairs))


def equation_matrix(m: Matching) -> EquationSystem:
    """Row ``e_a + e_{a+1} - e_b - e_{b+1}`` (positions cyclic mod 2k) for each pair ``(a, b)``."""
    size = 2 * m.k
    rows = []
    for a, b in m.pairs:
        row = [0] * size
        row[a - 1] += 1
        row[a % size] += 1
        row[b - 1] -= 1
        row[b % size] -= 1
        rows.append(row)
    return EquationSystem(m, IntMatrix.from_rows(rows, cols=size))


def matching_nullity(m: Matching) -> int:
    return equation_matrix(m).nullity()


def limit_even_moment(k: int) -> int:
    """Number of matchings whose equation system has nullity ``k + 1``."""
    _check_k(k, MATCHING_K_CAP)
    return sum(1 for m in enumerate_matchings(k) if matching_nullity(m) == k + 1)


def count_odd_even_matchings(k: int) -> int:
    """Count odd-even matchings by direct search (pruning same-parity partners)."""
    _check_k(k, ODD_EVEN_K_CAP)

    def count(items: tuple[int, ...]) -> int:
        if not items:
            return 1
        first, rest = items[0], items[1:]
        return sum(count(rest[:i] + rest[i + 1:])
                   for i, p in enumerate(rest) if (first + p) % 2 == 1)

    return count(tuple(range(1, 2 * k + 1)))


def partition_audit(k: int) -> list[dict]:
    """Per-matching rows: pairs, odd-even flag, nullity, and whether it contributes."""
    rows = []
    for m in enumerate_matchings(k):
        nul = matching_nullity(m)
        rows.append({"k": k, "pairs": str(m), "odd_even": m.odd_even,
                     "nullity": nul, "contributes": nul == k + 1})
    return rows


def build_B(n: int, s: int, t: int) -> IntMatrix:
    """``s`` on the diagonal, ``t`` on the cyclic superdiagonal (including entry ``(n-1, 0)``)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] += s
        rows[i][(i + 1) % n] += t
    return IntMatrix.from_rows(rows, cols=n)


def m_pi(pi: Sequence[int], n: int, s: int = 1, t: int = 1) -> IntMatrix:
    """``(I - P_pi) B_n(s, t)``: row ``a`` is ``B[a] - B[pi[a]]`` (0-based ``pi``)."""
    pi = [int(p) for p in pi]
    if len(pi) != n or sorted(pi) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {pi}")
    b = build_B(n, s, t).data
    rows = [[b[a][j] - b[pi[a]][j] for j in range(n)] for a in range(n)]
    return IntMatrix.from_rows(rows, cols=n)


def _as_moments(dist_moments) -> list[Fraction]:
    if hasattr(dist_moments, "moments"):
        raise TypeError("pass dist.moments(power), not the distribution")
    return [Fraction(p) for p in dist_moments]


def finite_N_expected_trace(N: int, power: int, dist_moments, chunk: int = 1 << 18) -> Fraction:
    """Exact ``E[tr(H_N^power)]`` for a circulant Hankel matrix with i.i.d. entries.

    Sums, over all index tuples in ``Z_N^power``, the product over value
    classes ``(i_j + i_{j+1}) mod N`` of ``p_{multiplicity}``. Tuples are
    tallied by their multiplicity pattern, so only integer counting happens
    in the loop; the rational weights are applied once per pattern. Shifting
    every index by the same amount permutes the classes, so tuples with
    ``i_1 = 0`` are counted and the total is multiplied by N.

    ``dist_moments`` is ``[p_1, ..., p_power]``.
    """
    if N < 1 or power < 1:
        raise ValueError("N and power must be positive")
    if N**power > ORACLE_BUDGET:
        raise ValueError(f"N^power = {N**power} exceeds the oracle budget {ORACLE_BUDGET}")
    p = _as_moments(dist_moments)
    if len(p) < power:
        raise ValueError(f"need moments p_1..p_{power}, got {len(p)}")
    if p[0] != 0 or (power >= 2 and p[1] != 1):
        raise ValueError("moments must have p_1 = 0 and p_2 = 1")

    tally: Counter = Counter()
    total = N ** (power - 1)
    weights = N ** np.arange(power - 2, -1, -1, dtype=np.int64) if power > 1 else None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        tuples = np.zeros((idx.size, power), dtype=np.int64)
        if power > 1:
            tuples[:, 1:] = (idx[:, None] // weights[None, :]) % N
        classes = (tuples + np.roll(tuples, -1, axis=1)) % N
        rows = idx.size
        flat = (np.arange(rows)[:, None] * N + classes).ravel()
        counts = np.bincount(flat, minlength=rows * N).reshape(rows, N)
        counts = -np.sort(-counts, axis=1)[:, :power]
        # any class hit exactly once kills the term (p_1 = 0)
        keep = ~np.any(counts == 1, axis=1)
        if not np.any(keep):
            continue
        patterns, freq = np.unique(counts[keep], axis=0, return_counts=True)
        for pattern, f in zip(patterns, freq):
            tally[tuple(int(v) for v in pattern if v)] += int(f)
    result = Fraction(0)
    for pattern, f in tally.items():
        result += f * prod((p[m - 1] for m in pattern), start=Fraction(1))
    return result * N


def finite_N_moment(N: int, power: int, dist_moments) -> Fraction:
    """``E[tr(H_N^power)] / N^(power/2 + 1)`` for even ``power`` (exact)."""
    if power % 2:
        raise ValueError("exact normalization needs an even power")
    return finite_N_expected_trace(N, power, dist_moments) / Fraction(N) ** (power // 2 + 1)

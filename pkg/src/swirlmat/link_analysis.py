"""Structure of (s, t)-link patterns on N x N matrices.

Position ``(r, c)`` (row, column, 0-based) carries the linear key
``t*r + s*c mod N``; positions sharing a key hold the same entry. With
``symmetric=True`` positions are also linked when the swapped key
``s*r + t*c`` agrees, and classes are the transitive closure of both
relations. ``(1, 1)`` gives circulant Hankel matrices and ``(1, N-1)``
circulant Toeplitz ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "PatternClass",
    "LinkReport",
    "position_classes",
    "canonical_labels",
    "subgroup_order",
    "classify_pattern",
    "gcd_audit",
    "audit_grid",
]


class PatternClass(enum.Flag):
    """Classification flags; for N = 2 Hankel and Toeplitz patterns coincide and both bits are set."""

    OTHER = 0
    CIRCULANT_HANKEL = enum.auto()
    CIRCULANT_TOEPLITZ = enum.auto()

    @property
    def label(self) -> str:
        if not self:
            return "other"
        names = []
        if PatternClass.CIRCULANT_HANKEL in self:
            names.append("circulant-hankel")
        if PatternClass.CIRCULANT_TOEPLITZ in self:
            names.append("circulant-toeplitz")
        return "+".join(names)


@dataclass(frozen=True)
class LinkReport:
    N: int
    s: int
    t: int
    class_count_plain: int
    class_count_symmetric: int
    subgroup_order: int
    coset_index: int
    gcd_value: int
    classification: PatternClass

    @property
    def ratio(self) -> float | None:
        """``class_count_plain / gcd_value`` (None when the gcd is 0)."""
        return self.class_count_plain / self.gcd_value if self.gcd_value else None

    def to_row(self) -> dict:
        return {
            "N": self.N, "s": self.s, "t": self.t,
            "class_count_plain": self.class_count_plain,
            "class_count_symmetric": self.class_count_symmetric,
            "subgroup_order": self.subgroup_order,
            "coset_index": self.coset_index,
            "gcd_value": self.gcd_value,
            "ratio": self.ratio,
            "classification": self.classification.label,
        }


def canonical_labels(keys: np.ndarray) -> tuple[int, np.ndarray]:
    """Relabel so class ids follow first appearance in row-major order."""
    flat = np.asarray(keys).ravel()
    _, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return int(first.size), rank[inverse.ravel()].reshape(np.shape(keys))


def _keys(N: int, a: int, b: int) -> np.ndarray:
    r = np.arange(N)[:, None]
    c = np.arange(N)[None, :]
    return (a * r + b * c) % N


@lru_cache(maxsize=4096)
def _position_classes(N: int, s: int, t: int, symmetric: bool):
    plain = _keys(N, t, s)
    if not symmetric:
        count, labels = canonical_labels(plain)
    else:
        swapped = _keys(N, s, t)
        edges = coo_matrix(
            (np.ones(N * N, dtype=np.int8), (plain.ravel(), N + swapped.ravel())),
            shape=(2 * N, 2 * N),
        )
        _, component = connected_components(edges, directed=False)
        count, labels = canonical_labels(component[plain])
    labels.setflags(write=False)
    return count, labels


def position_classes(N: int, s: int, t: int, symmetric: bool = False) -> tuple[int, np.ndarray]:
    """Number of entry classes and the N x N array of canonical class ids."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return _position_classes(int(N), int(s) % N, int(t) % N, bool(symmetric))


def subgroup_order(N: int, s: int, t: int) -> tuple[int, int]:
    """Order and index of ``<(s, t), (t, s)>`` in ``(Z/N)^2``, by enumerating ``a(s,t) + b(t,s)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    a = np.arange(N)[:, None]
    b = np.arange(N)[None, :]
    x = (a * s + b * t) % N
    y = (a * t + b * s) % N
    order = int(np.unique((x * N + y).ravel()).size)
    return order, (N * N) // order


def _reference_labels(N: int, kind: str) -> np.ndarray:
    r = np.arange(N)[:, None]
    c = np.arange(N)[None, :]
    keys = (r + c) % N if kind == "hankel" else (c - r) % N
    return canonical_labels(keys)[1]


def classify_pattern(N: int, s: int, t: int) -> PatternClass:
    """Compare the plain class labeling to Hankel and Toeplitz labelings up to relabeling."""
    if N < 2:
        raise ValueError("N must be >= 2")
    _, labels = position_classes(N, s, t, symmetric=False)
    result = PatternClass.OTHER
    if np.array_equal(labels, _reference_labels(N, "hankel")):
        result |= PatternClass.CIRCULANT_HANKEL
    if np.array_equal(labels, _reference_labels(N, "toeplitz")):
        result |= PatternClass.CIRCULANT_TOEPLITZ
    return result


def gcd_audit(N: int, s: int, t: int) -> LinkReport:
    """Class counts next to the coset index and ``gcd((s+t)(s-t), N)``, with ``gcd(0, N) = N``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    s, t = s % N, t % N
    order, index = subgroup_order(N, s, t)
    return LinkReport(
        N=N, s=s, t=t,
        class_count_plain=position_classes(N, s, t, False)[0],
        class_count_symmetric=position_classes(N, s, t, True)[0],
        subgroup_order=order,
        coset_index=index,
        gcd_value=gcd((s + t) * (s - t), N),
        classification=classify_pattern(N, s, t),
    )


def audit_grid(ns, ss=None, ts=None, include_degenerate: bool = False) -> list[LinkReport]:
    """``gcd_audit`` over a grid; ``ss``/``ts`` default to all residues ``0..N-1``."""
    reports = []
    for N in ns:
        for s in (range(N) if ss is None else ss):
            for t in (range(N) if ts is None else ts):
                if not include_degenerate and s % N == 0 and t % N == 0:
                    continue
                reports.append(gcd_audit(N, s, t))
    return reports

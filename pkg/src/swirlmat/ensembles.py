"""Seeded entry distributions and constructors for the patterned matrix families."""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from math import prod

import numpy as np

from .matrix_core import DenseMatrix, as_array

__all__ = [
    "DistKind",
    "EntryDistribution",
    "Family",
    "PatternSpec",
    "derive_seed",
    "sample_sequence",
    "build_circulant_hankel",
    "build_circulant_toeplitz",
    "build_exchange",
    "build_concentric_even",
    "build_link_matrix",
    "values_needed",
    "build_pattern",
    "sample_pattern",
]

SEED_MASK = (1 << 64) - 1


class DistKind(str, enum.Enum):
    STANDARD_NORMAL = "normal"
    RADEMACHER = "rademacher"


def _double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True)
class EntryDistribution:
    """Source of i.i.d. mean-0, variance-1 reals with known moments.

    The stream is a function of ``(kind, seed)`` only.
    """

    kind: DistKind = DistKind.STANDARD_NORMAL
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", DistKind(self.kind))
        if not 0 <= int(self.seed) <= SEED_MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "seed", int(self.seed))

    def moment(self, n: int) -> Fraction:
        """Exact raw moment ``E[x**n]``."""
        if n < 0:
            raise ValueError("moment order must be non-negative")
        if n % 2:
            return Fraction(0)
        if self.kind is DistKind.RADEMACHER:
            return Fraction(1)
        return Fraction(_double_factorial(n - 1))

    def moments(self, up_to: int) -> list[Fraction]:
        """``[p_1, ..., p_up_to]``."""
        return [self.moment(n) for n in range(1, up_to + 1)]

    def even_moments(self, count: int = 8) -> list[Fraction]:
        """``[p_2, p_4, ..., p_{2 count}]``."""
        return [self.moment(2 * m) for m in range(1, count + 1)]

    def for_trial(self, trial: int) -> "EntryDistribution":
        return replace(self, seed=derive_seed(self.seed, trial))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed))


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit child seed for trial ``index``."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_sequence(dist: EntryDistribution, count: int) -> np.ndarray:
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = dist.rng()
    if dist.kind is DistKind.RADEMACHER:
        return rng.integers(0, 2, size=count).astype(float) * 2.0 - 1.0
    return rng.standard_normal(count)


class Family(str, enum.Enum):
    CIRCULANT_HANKEL = "circulant-hankel"
    CIRCULANT_TOEPLITZ = "circulant-toeplitz"
    EXCHANGE = "exchange"
    CONCENTRIC_EVEN = "concentric-even"
    LINK_ST = "link"


@dataclass(frozen=True)
class PatternSpec:
    """Which patterned family to build, and at which base dimension.

    ``ell`` is the swirl depth for the concentric even family (1 for the plain
    ``sw(A, J)``); ``s``, ``t`` and ``symmetric_link`` only matter for
    :attr:`Family.LINK_ST`.
    """

    family: Family
    n: int
    s: int = 1
    t: int = 1
    symmetric_link: bool = False
    ell: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if self.family is Family.LINK_ST:
            s, t = self.s % self.n, self.t % self.n
            if s == 0 and t == 0 and self.n > 1:
                raise ValueError("degenerate link (s, t) = (0, 0) mod n")
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "t", t)

    @property
    def dim(self) -> int:
        """Dimension of the generated matrix."""
        if self.family is Family.CONCENTRIC_EVEN:
            return self.n * 2**self.ell
        return self.n

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PatternSpec":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "PatternSpec":
        return cls.from_dict(json.loads(text))


def _values(values) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("at least one value is required")
    return v


def build_circulant_hankel(values, label: str | None = "circulant-hankel") -> DenseMatrix:
    """``entry(i, j) = values[(i + j) mod N]``."""
    v = _values(values)
    n = v.size
    idx = np.add.outer(np.arange(n), np.arange(n)) % n
    return DenseMatrix(v[idx], label=label)


def build_circulant_toeplitz(values, label: str | None = "circulant-toeplitz") -> DenseMatrix:
    """``entry(i, j) = values[(j - i) mod N]``."""
    v = _values(values)
    n = v.size
    idx = np.subtract.outer(np.arange(n), np.arange(n)).T % n
    return DenseMatrix(v[idx], label=label)


def build_exchange(n: int) -> DenseMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    return DenseMatrix(np.eye(n)[::-1], label="exchange")


def build_concentric_even(values, ell: int = 1) -> DenseMatrix:
    """``sw(T, J)`` for the circulant Toeplitz ``T`` built from ``values``.

    With ``ell > 1`` the swirl is iterated (dimension ``N * 2**ell``).
    """
    from .swirl_algebra import iterated_swirl

    a = build_circulant_toeplitz(values)
    j = build_exchange(a.n)
    return DenseMatrix(as_array(iterated_swirl(a, j, ell)), label="concentric-even")


def build_link_matrix(spec: PatternSpec, values) -> DenseMatrix:
    """Fill each (s, t) position class with one value, in canonical class order.

    ``values`` must provide at least as many entries as there are classes
    (see :func:`values_needed`); extra entries are ignored.
    """
    from .link_analysis import position_classes

    if spec.family is not Family.LINK_ST:
        raise ValueError("build_link_matrix needs a LinkST pattern spec")
    count, labels = position_classes(spec.n, spec.s, spec.t, spec.symmetric_link)
    v = np.asarray(values, dtype=float).ravel()
    if v.size < count:
        raise ValueError(f"need {count} values, got {v.size}")
    tag = f"link(s={spec.s},t={spec.t}{',sym' if spec.symmetric_link else ''})"
    return DenseMatrix(v[labels], label=tag)


def values_needed(spec: PatternSpec) -> int:
    """Number of i.i.d. draws one realization of ``spec`` consumes."""
    if spec.family is Family.EXCHANGE:
        return 0
    if spec.family is Family.LINK_ST:
        from .link_analysis import position_classes

        return position_classes(spec.n, spec.s, spec.t, spec.symmetric_link)[0]
    return spec.n


def build_pattern(spec: PatternSpec, values=None) -> DenseMatrix:
    """Dispatch to the constructor for ``spec.family``."""
    fam = spec.family
    if fam is Family.EXCHANGE:
        return build_exchange(spec.n)
    if fam is Family.LINK_ST:
        return build_link_matrix(spec, values)
    v = _values(values)
    if v.size != spec.n:
        raise ValueError(f"need {spec.n} values, got {v.size}")
    if fam is Family.CIRCULANT_HANKEL:
        return build_circulant_hankel(v)
    if fam is Family.CIRCULANT_TOEPLITZ:
        return build_circulant_toeplitz(v)
    return build_concentric_even(v, spec.ell)


def sample_pattern(spec: PatternSpec, dist: EntryDistribution) -> DenseMatrix:
    """One seeded realization of ``spec``."""
    return build_pattern(spec, sample_sequence(dist, values_needed(spec)))

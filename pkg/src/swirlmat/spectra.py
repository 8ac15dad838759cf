"""Scaled empirical spectra, Monte Carlo pooling, reference laws and fit statistics.

A matrix of dimension ``n`` with ``c`` eigenvalues that are not trivially zero
contributes its ``c`` largest-magnitude eigenvalues, each scaled by
``sqrt(c) / n``. For an N x N circulant Hankel matrix this is ``lambda / sqrt(N)``;
for the 2N x 2N ``sw(A, J)`` it is ``lambda / (2 sqrt(N))``.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ensembles import EntryDistribution, Family, PatternSpec, sample_pattern
from .matrix_core import EigenSolverError, NonSymmetricError, as_array, exact_rank, sym_eigenvalues

__all__ = [
    "SpectralSample",
    "ReferenceKind",
    "ReferenceDistribution",
    "SYMMETRIZED_RAYLEIGH",
    "nontrivial_count",
    "numerical_rank",
    "scaled_spectrum",
    "sample_moment",
    "matrix_moment",
    "run_monte_carlo",
    "require_symmetric_pattern",
    "reference_query",
    "ks_statistic",
    "histogram",
    "HIST_BINS",
    "HIST_RANGE",
]

HIST_BINS = 81
HIST_RANGE = (-4.0, 4.0)
ZERO_RTOL = 1e-8


class TrialError(RuntimeError):
    """Eigensolver failure inside a Monte Carlo trial."""

    def __init__(self, trial: int, cause: Exception):
        super().__init__(f"trial {trial}: {cause}")
        self.trial = trial


@dataclass(frozen=True)
class SpectralSample:
    """Pooled scaled eigenvalues from ``trials`` independent draws."""

    scaled_eigs: np.ndarray
    n: int
    c: int
    trials: int
    ensemble: PatternSpec | None = None
    seed: int | None = None
    rank_range: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        eigs = np.sort(np.asarray(self.scaled_eigs, dtype=float).ravel())
        if eigs.size != self.c * self.trials:
            raise ValueError(f"expected {self.c * self.trials} eigenvalues, got {eigs.size}")
        eigs.setflags(write=False)
        object.__setattr__(self, "scaled_eigs", eigs)

    def __len__(self) -> int:
        return self.scaled_eigs.size

    def __eq__(self, other):
        if not isinstance(other, SpectralSample):
            return NotImplemented
        return (np.array_equal(self.scaled_eigs, other.scaled_eigs)
                and (self.n, self.c, self.trials, self.ensemble, self.seed)
                == (other.n, other.c, other.trials, other.ensemble, other.seed))

    __hash__ = None

    @property
    def rank_unstable(self) -> bool:
        """True when the numerical rank disagreed with ``c`` in some trial."""
        return self.rank_range is not None and self.rank_range != (self.c, self.c)


def numerical_rank(eigs, rtol: float = ZERO_RTOL) -> int:
    """Count of eigenvalues above ``rtol`` times the largest magnitude."""
    mags = np.abs(np.asarray(eigs, dtype=float))
    if mags.size == 0 or mags.max() == 0:
        return 0
    return int(np.sum(mags > rtol * mags.max()))


@lru_cache(maxsize=256)
def _link_generic_rank(n: int, s: int, t: int, symmetric: bool) -> int:
    from .link_analysis import position_classes

    count, labels = position_classes(n, s, t, symmetric)
    rng = np.random.default_rng(0)
    best = 0
    # rank with generic (random integer) class values; two draws guard against unlucky cancellation
    for _ in range(2):
        vals = [int(v) for v in rng.integers(1, 2**31, size=count)]
        rows = [[vals[labels[i, j]] for j in range(n)] for i in range(n)]
        best = max(best, exact_rank(rows))
    return best


def nontrivial_count(spec: PatternSpec) -> int:
    """The ``c`` used to scale spectra of ``spec``.

    N for circulant Hankel/Toeplitz and for (iterated) ``sw(A, J)``; for
    link patterns the exact rank of a generic integer realization.
    """
    if spec.family is Family.LINK_ST:
        return _link_generic_rank(spec.n, spec.s, spec.t, spec.symmetric_link)
    return spec.n


def require_symmetric_pattern(spec: PatternSpec) -> None:
    """Raise NonSymmetricError unless every realization of ``spec`` is symmetric."""
    if spec.family is Family.CIRCULANT_TOEPLITZ and spec.n > 2:
        raise NonSymmetricError("circulant Toeplitz realizations are not symmetric for n > 2")
    if spec.family is Family.LINK_ST:
        from .link_analysis import position_classes

        labels = position_classes(spec.n, spec.s, spec.t, spec.symmetric_link)[1]
        if not np.array_equal(labels, labels.T):
            raise NonSymmetricError(
                f"(s, t) = ({spec.s}, {spec.t}) link pattern at n = {spec.n} is not symmetric")


def _select(eigs: np.ndarray, c: int) -> np.ndarray:
    if c == eigs.size:
        return eigs
    order = np.argsort(-np.abs(eigs), kind="stable")
    return np.sort(eigs[order[:c]])


def scaled_spectrum(m, c: int | None = None, method: str = "lapack") -> np.ndarray:
    """The ``c`` largest-magnitude eigenvalues of symmetric ``m``, scaled by ``sqrt(c)/n``."""
    a = as_array(m)
    n = a.shape[0]
    if c is None:
        c = n
    if not 0 < c <= n:
        raise ValueError(f"c must be in 1..{n}")
    eigs = sym_eigenvalues(a, method=method)
    return _select(eigs, c) * (math.sqrt(c) / n)


def matrix_moment(m, k: int, c: int | None = None) -> float:
    """``c^(k/2 - 1) / n^k * tr(m^k)`` computed from the trace, not the eigenvalues."""
    from .matrix_core import trace_power

    a = as_array(m)
    n = a.shape[0]
    c = n if c is None else c
    return c ** (k / 2 - 1) / n**k * trace_power(a, k)


def sample_moment(s, k: int) -> float:
    """Mean of ``x**k`` over the pooled scaled eigenvalues."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x = s.scaled_eigs if isinstance(s, SpectralSample) else np.asarray(s, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    return float(np.mean(x**k))


def _thread_cap() -> int:
    env = os.environ.get("SWIRL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"SWIRL_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_monte_carlo(spec: PatternSpec, dist: EntryDistribution, trials: int,
                    c: int | None = None, method: str = "lapack",
                    workers: int | None = None) -> SpectralSample:
    """Pool scaled spectra of ``trials`` independent realizations of ``spec``.

    Trial ``i`` draws its entries from ``dist.for_trial(i)``, so the result
    does not depend on how trials are scheduled across workers.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    require_symmetric_pattern(spec)
    if c is None:
        c = nontrivial_count(spec)
    dim = spec.dim

    def one(i: int):
        m = sample_pattern(spec, dist.for_trial(i))
        try:
            eigs = sym_eigenvalues(m, method=method)
        except EigenSolverError as exc:
            raise TrialError(i, exc) from exc
        return _select(eigs, c) * (math.sqrt(c) / dim), numerical_rank(eigs)

    if workers is None:
        workers = _thread_cap()
    workers = max(1, min(workers, trials))
    if workers == 1:
        results = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials)))
    ranks = [r for _, r in results]
    return SpectralSample(
        scaled_eigs=np.concatenate([e for e, _ in results]),
        n=dim, c=c, trials=trials, ensemble=spec, seed=dist.seed,
        rank_range=(min(ranks), max(ranks)),
    )


class ReferenceKind(str, enum.Enum):
    SYMMETRIZED_RAYLEIGH = "symmetrized-rayleigh"
    SYMMETRIZED_WEIBULL = "symmetrized-weibull"


@dataclass(frozen=True)
class ReferenceDistribution:
    """Weibull law reflected to the whole line: density ``f(|x|; scale, shape) / 2``.

    The symmetrized Rayleigh law ``|x| exp(-x^2)`` is the case
    ``scale = 1, shape = 2``.
    """

    kind: ReferenceKind = ReferenceKind.SYMMETRIZED_RAYLEIGH
    scale: float = 1.0
    shape: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ReferenceKind(self.kind))
        if self.kind is ReferenceKind.SYMMETRIZED_RAYLEIGH and (self.scale, self.shape) != (1.0, 2.0):
            raise ValueError("the symmetrized Rayleigh law has scale 1 and shape 2")
        if self.scale <= 0 or self.shape <= 0:
            raise ValueError("Weibull scale and shape must be positive")

    def pdf(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        lam, k = self.scale, self.shape
        z = x / lam
        with np.errstate(divide="ignore", invalid="ignore"):
            f = 0.5 * (k / lam) * z ** (k - 1) * np.exp(-(z**k))
        return np.where(np.isfinite(f), f, np.inf)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        tail = 0.5 * np.exp(-((np.abs(x) / self.scale) ** self.shape))
        return np.where(x >= 0, 1.0 - tail, tail)

    def ppf(self, q):
        q = np.asarray(q, dtype=float)
        if np.any((q <= 0) | (q >= 1)):
            raise ValueError("quantile levels must lie in (0, 1)")
        tail = np.where(q >= 0.5, 2.0 * (1.0 - q), 2.0 * q)
        mag = self.scale * (-np.log(tail)) ** (1.0 / self.shape)
        return np.where(q >= 0.5, mag, -mag)

    def moment(self, k: int) -> float:
        """Raw moment: 0 for odd ``k``, ``scale^k Gamma(k/shape + 1)`` for even ``k``."""
        if k < 0:
            raise ValueError("moment order must be non-negative")
        if k % 2:
            return 0.0
        if self.shape == 2.0 and self.scale == 1.0:
            return float(math.factorial(k // 2))
        return self.scale**k * math.gamma(k / self.shape + 1)


SYMMETRIZED_RAYLEIGH = ReferenceDistribution()


def reference_query(d: ReferenceDistribution, what: str, arg) -> float:
    """Dispatch helper: ``what`` is one of ``"pdf"``, ``"cdf"``, ``"moment"``."""
    if what == "pdf":
        return float(d.pdf(arg))
    if what == "cdf":
        return float(d.cdf(arg))
    if what == "moment":
        return d.moment(int(arg))
    raise ValueError(f"unknown query {what!r}")


def ks_statistic(s, d: ReferenceDistribution = SYMMETRIZED_RAYLEIGH) -> float:
    """Kolmogorov-Smirnov distance between the sample's empirical CDF and ``d``.

    Both the left and right limits of the empirical step function are compared
    at every sample point, which handles ties correctly.
    """
    x = s.scaled_eigs if isinstance(s, SpectralSample) else np.sort(np.asarray(s, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    f = d.cdf(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(min(1.0, max(d_plus, d_minus, 0.0)))


def histogram(s, bins: int = HIST_BINS, value_range=HIST_RANGE):
    """Density histogram; returns ``(edges, density, outside)``.

    ``outside`` counts samples beyond ``value_range``; densities are normalized
    over the in-range samples so that ``sum(density * width) == 1``.
    """
    x = s.scaled_eigs if isinstance(s, SpectralSample) else np.asarray(s, dtype=float)
    lo, hi = value_range
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    inside = int(counts.sum())
    if inside == 0:
        raise ValueError("no samples inside the histogram range")
    density = counts / (inside * np.diff(edges))
    return edges, density, int(x.size - inside)

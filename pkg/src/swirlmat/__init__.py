"""Swirl block matrices, circulant Hankel ensembles and their limiting spectra."""

__version__ = "0.1.0"

from .matrix_core import DenseMatrix, IntMatrix, exact_nullity, exact_rank, sym_eigenvalues
from .ensembles import (
    EntryDistribution,
    Family,
    PatternSpec,
    build_circulant_hankel,
    build_circulant_toeplitz,
    build_concentric_even,
    build_exchange,
    build_link_matrix,
    sample_sequence,
)
from .swirl_algebra import (
    iterated_swirl,
    swirl,
    verify_iterated_trace_identity,
    verify_trace_identity,
    verify_transpose_identity,
)
from .spectra import (
    SYMMETRIZED_RAYLEIGH,
    ReferenceDistribution,
    SpectralSample,
    ks_statistic,
    run_monte_carlo,
    sample_moment,
    scaled_spectrum,
)
from .moment_combinatorics import (
    Matching,
    count_odd_even_matchings,
    enumerate_matchings,
    equation_matrix,
    finite_N_expected_trace,
    limit_even_moment,
    m_pi,
)
from .link_analysis import classify_pattern, gcd_audit, position_classes, subgroup_order

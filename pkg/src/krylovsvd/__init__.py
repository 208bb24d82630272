"""Randomized truncated SVD by subspace iteration and block Krylov sketches.

Also provides the iteration-budget and error-bound calculators that go with
these methods and a Monte-Carlo harness that checks them empirically.
"""
from ._kernels import BACKEND
from .bounds import (
    BoundVerdict,
    IterationBudget,
    bound_value,
    budget_gap_dependent,
    budget_lanczos_random,
    budget_lanczos_warm,
    budget_power_gap_independent,
    verify,
)
from .chebyshev import ChebParams, apply_filter_block, chebyshev_T, phi
from .errors import *  # noqa: F401,F403
from .linalg import (
    SvdFactorization,
    as_matrix,
    frobenius_norm,
    project_onto_range,
    qr_thin,
    rank_k_project_F,
    spectral_norm,
    svd_reference,
    truncate,
)
from .randinit import (
    ANGLE_OVERFLOW,
    InitializationReport,
    construct_Z,
    gaussian_matrix,
    initialize,
    tan_angle_kdim,
)
from .solvers import (
    KrylovBasis,
    SketchResult,
    build_krylov,
    extract_rank_k,
    power_iterate,
    randomized_svd,
)

__version__ = "0.1.0"

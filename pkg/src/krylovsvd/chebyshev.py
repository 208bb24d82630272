"""Chebyshev polynomials and the shifted filter used to analyse Krylov sketches.

The filter is ``p(x) = (1 + gamma) * alpha * T_d(x / alpha) / T_d(1 + gamma)``;
``phi`` agrees with ``p`` for positive ``x`` and vanishes elsewhere. ``p``
is small on ``[0, alpha]`` and exceeds ``x`` beyond ``(1 + gamma) alpha``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FilterOverflowError
from .linalg import as_matrix


@dataclass(frozen=True)
class ChebParams:
    """Threshold ``alpha`` (squared singular value units), gap ``gamma``, degree."""

    alpha: float
    gamma: float
    degree: int

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError(f"degree must be an integer >= 1, got {self.degree}")

    @property
    def scale(self):
        """Leading factor ``(1 + gamma) alpha / T_d(1 + gamma)``."""
        return (1.0 + self.gamma) * self.alpha / chebyshev_T(self.degree, 1.0 + self.gamma)


def chebyshev_T(d, y):
    """T_d(y) by the three-term recurrence."""
    if d < 0:
        raise ValueError(f"degree must be >= 0, got {d}")
    if d == 0:
        return 1.0
    prev, cur = 1.0, float(y)
    for _ in range(d - 1):
        prev, cur = cur, 2.0 * y * cur - prev
    return cur


def chebyshev_T_closed(d, y):
    """Closed form ``((y + r)^d + (y - r)^d) / 2`` with ``r = sqrt(y^2 - 1)``, y >= 1."""
    if y < 1.0:
        raise ValueError("closed form needs y >= 1")
    r = math.sqrt(y * y - 1.0)
    return 0.5 * (y + r) ** d + 0.5 * (y - r) ** d


def cheb_poly(x, params):
    """The polynomial ``p(x)``, defined for every real ``x``."""
    return params.scale * chebyshev_T(params.degree, x / params.alpha)


def phi(x, params):
    """``p(x)`` for ``x > 0`` and ``0`` otherwise."""
    if x <= 0.0:
        return 0.0
    return cheb_poly(x, params)


def tail_bound(params):
    """Uniform bound ``alpha / 2^(d sqrt(gamma) - 1)`` on ``|phi|`` over [0, alpha]."""
    return params.alpha / 2.0 ** (params.degree * math.sqrt(params.gamma) - 1.0)


def _check_finite(B, step):
    if not np.all(np.isfinite(B)):
        raise FilterOverflowError(
            f"filter recurrence overflowed at degree {step}; rescale M"
        )


def apply_filter_block(M, X, params):
    """``p(M M^T) X`` via the block three-term recurrence.

    ``M M^T`` is never formed: each application is ``M (M^T B)``, scaled by
    ``1/alpha`` so intermediates grow like ``T_d(sigma_1^2 / alpha)``.
    """
    M = as_matrix(M, "M")
    X = as_matrix(X, "X")
    if M.shape[0] != X.shape[0]:
        raise DimensionError(f"M has {M.shape[0]} rows, X has {X.shape[0]}")
    inv_alpha = 1.0 / params.alpha

    def step(B):
        return inv_alpha * (M @ (M.T @ B))

    with np.errstate(over="ignore", invalid="ignore"):
        prev, cur = X, step(X)
        _check_finite(cur, 1)
        for j in range(2, params.degree + 1):
            prev, cur = cur, 2.0 * step(cur) - prev
            _check_finite(cur, j)
        out = params.scale * cur
    _check_finite(out, params.degree)
    return np.asfortranarray(out)


def apply_monomial_block(M, X, t):
    """``(M M^T)^t X`` without renormalization."""
    M = as_matrix(M, "M")
    B = as_matrix(X, "X")
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(t):
            B = M @ (M.T @ B)
            _check_finite(B, j + 1)
    return np.asfortranarray(B)

"""Iteration budgets, error-bound values and verdicts.

Every budget is the explicit (pre-big-O) expression, rounded up to an
integer and floored at 1. Probabilistic budgets record the failure
probability ``2 exp(-alpha^2 / 2)`` of the Gaussian start.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAlphaError, NoGapError
from .randinit import failure_probability, initialization_bound

THEOREMS = (
    "T3.1-random",
    "T3.1-warm",
    "T5.2-power",
    "T6.1-power",
    "T6.1-lanczos",
    "T6.3-power",
    "T6.3-lanczos",
)
Z_99 = 2.58

__all__ = [
    "IterationBudget",
    "BoundVerdict",
    "initialization_bound",
    "failure_probability",
    "budget_lanczos_random",
    "budget_lanczos_warm",
    "budget_power_gap_independent",
    "budget_gap_dependent",
    "power_angle_steps",
    "lanczos_angle_degree",
    "bound_value",
    "verify",
    "required_rate",
    "block_lanczos_cost",
    "degree_small_block",
    "degree_large_block",
]


@dataclass(frozen=True)
class IterationBudget:
    count: int
    theorem: str
    epsilon: float
    alpha: float
    failure_probability: float
    raw: float = float("nan")

    def __int__(self):
        return self.count


def ceil_count(x):
    """Ceiling that ignores float noise just above an integer; at least 1."""
    return max(1, math.ceil(x - 1e-9 * max(1.0, abs(x))))


def _check_epsilon(epsilon, upper=True):
    if not epsilon > 0.0 or (upper and epsilon > 1.0):
        rng = "(0, 1]" if upper else "> 0"
        raise ValueError(f"epsilon must be in {rng}, got {epsilon}")


def budget_lanczos_random(n, p, k, epsilon, alpha):
    """Krylov degree for the random-start gap-independent bound."""
    _check_epsilon(epsilon)
    bound = initialization_bound(n, p, k, alpha)
    raw = math.sqrt(2.0 / epsilon) * (2.5 + math.log2(bound / epsilon))
    return IterationBudget(ceil_count(raw), "T3.1-random", epsilon, alpha,
                           failure_probability(alpha), raw)


def budget_lanczos_warm(beta, epsilon):
    """Krylov degree for a warm start with initial angle tangent at most ``beta``."""
    _check_epsilon(epsilon)
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    raw = math.sqrt(2.0 / epsilon) * (2.0 + math.log2(beta / epsilon))
    return IterationBudget(ceil_count(raw), "T3.1-warm", epsilon, 0.0, 0.0, raw)


def budget_power_gap_independent(n, p, k, epsilon, alpha, tan_theta=None):
    """Power iterations ``1 + log2(tan / eps) / eps``.

    ``tan`` defaults to the high-probability initialization bound; a measured
    tangent may be supplied instead.
    """
    _check_epsilon(epsilon)
    bound = initialization_bound(n, p, k, alpha) if tan_theta is None else tan_theta
    raw = 1.0 + math.log2(bound / epsilon) / epsilon
    return IterationBudget(ceil_count(raw), "T5.2-power", epsilon, alpha,
                           failure_probability(alpha), raw)


def budget_gap_dependent(sigma_k, sigma_p1, n, p, k, epsilon, alpha,
                         method="power", target="angle"):
    """Gap-dependent budgets.

    ``target="angle"`` drives tan(V_k, sketch) below ``epsilon``;
    ``target="norm"`` gives the squared-norm bound
    ``||M - M_k||^2 + epsilon sigma_{p+1}^2``.
    """
    _check_epsilon(epsilon, upper=False)
    if method not in ("power", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if target not in ("angle", "norm"):
        raise ValueError(f"unknown target {target!r}")
    if not sigma_p1 > 0.0:
        raise ValueError(f"sigma_p1 must be positive, got {sigma_p1}")
    if sigma_k <= sigma_p1:
        raise NoGapError(f"sigma_k={sigma_k} does not exceed sigma_p1={sigma_p1}")
    bound = initialization_bound(n, p, k, alpha)
    if target == "angle":
        ratio = bound / epsilon
        tag = "T6.1"
    else:
        ratio = math.sqrt(n - p) * bound / math.sqrt(epsilon)
        tag = "T6.3"
    gap = sigma_k / sigma_p1
    if method == "power":
        raw = math.log(ratio) / (2.0 * math.log(gap))
    else:
        raw = (1.0 + math.log2(ratio)) / math.sqrt(gap * gap - 1.0)
    return IterationBudget(ceil_count(raw), f"{tag}-{method}", epsilon, alpha,
                           failure_probability(alpha), raw)


def power_angle_steps(eig_ratio, epsilon):
    """Steps ``log(1/eps) / log(lambda_k / lambda_{p+1})`` for a contraction by eps."""
    if eig_ratio <= 1.0:
        raise NoGapError(f"eigenvalue ratio {eig_ratio} must exceed 1")
    return math.log(1.0 / epsilon) / math.log(eig_ratio)


def lanczos_angle_degree(eig_ratio, epsilon):
    """Degree ``(1 + log2(1/eps)) / sqrt(lambda_k / lambda_{p+1} - 1)``."""
    if eig_ratio <= 1.0:
        raise NoGapError(f"eigenvalue ratio {eig_ratio} must exceed 1")
    return (1.0 + math.log2(1.0 / epsilon)) / math.sqrt(eig_ratio - 1.0)


def _sigma(svd):
    return np.asarray(getattr(svd, "sigma", svd), dtype=np.float64)


def _at(sigma, i):
    # 1-based sigma_i; zero past the end
    return float(sigma[i - 1]) if i <= len(sigma) else 0.0


def bound_value(kind, svd, k, p, epsilon):
    """Squared-norm bound value.

    ``random``: ``sigma_{k+1}^2 + eps sigma_{p+1}^2``;
    ``warm``: ``(1 + eps) sigma_{k+1}^2``;
    ``frobenius``: ``||M - M_k||_F^2 + eps sigma_{p+1}^2``.
    ``svd`` is an :class:`SvdFactorization` or a descending sigma vector.
    """
    s = _sigma(svd)
    if kind == "random":
        return _at(s, k + 1) ** 2 + epsilon * _at(s, p + 1) ** 2
    if kind == "warm":
        return (1.0 + epsilon) * _at(s, k + 1) ** 2
    if kind == "frobenius":
        return float(np.sum(s[k:] ** 2)) + epsilon * _at(s, p + 1) ** 2
    raise ValueError(f"unknown bound kind {kind!r}")


@dataclass(frozen=True)
class BoundVerdict:
    bound_value: float
    measured: float
    passed: bool
    slack: float


def verify(result, bound, slack=0.0):
    """Check ``measured <= bound * (1 + slack)``.

    ``result`` is a :class:`SketchResult` (its spectral error is used) or a
    plain number.
    """
    if slack < 0.0:
        raise ValueError(f"slack must be >= 0, got {slack}")
    measured = float(getattr(result, "spectral_err_sq", result))
    return BoundVerdict(float(bound), measured, measured <= bound * (1.0 + slack), float(slack))


def required_rate(q, trials, z=Z_99):
    """Guaranteed success probability ``q`` minus a one-sided binomial margin."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return q - z * math.sqrt(q * (1.0 - q) / trials)


def block_lanczos_cost(n, block_size, degree):
    """Cost model of a block Krylov run on an n x n operator."""
    return {
        "time": n * n * block_size * degree,
        "memory": n * block_size * degree,
        "passes": degree,
    }


def degree_small_block(k, lam_km1, lam_k, lam_kb, epsilon):
    """Order-of-magnitude degree for block size ``b`` below ``k`` (unit constant)."""
    num = k * math.log(lam_km1 / (lam_km1 - lam_k)) + math.log(1.0 / epsilon)
    return num / math.sqrt((lam_k - lam_kb) / lam_kb)


def degree_large_block(lam_k, lam_p1, epsilon):
    """Order-of-magnitude degree for block size ``p >= k`` (unit constant)."""
    return math.log(1.0 / epsilon) / math.sqrt((lam_k - lam_p1) / lam_p1)

"""Gaussian starts, the null-space block ``Z`` and principal angles."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidAlphaError
from .linalg import as_matrix, check_orthonormal, qr_thin, svd_reference

#: Returned by :func:`tan_angle_kdim` when the two subspaces contain
#: mutually orthogonal directions, i.e. the tangent is unbounded.
ANGLE_OVERFLOW = math.inf
SINGULAR_TOL = 1e-12


def rng_from_seed(seed):
    """Counter-based Philox generator keyed by a nonnegative integer seed."""
    return np.random.Generator(np.random.Philox(seed))


def gaussian_matrix(rows, cols, seed):
    """``rows x cols`` matrix of i.i.d. standard normals, Fortran order.

    Draws are consumed column by column, so the first ``c`` columns of a
    wider draw with the same seed are the same numbers.
    """
    if rows < 1 or cols < 1:
        raise DimensionError(f"gaussian_matrix needs positive shape, got {rows}x{cols}")
    G = rng_from_seed(seed).standard_normal((cols, rows))
    return G.T


def failure_probability(alpha):
    """``2 exp(-alpha^2 / 2)``, capped at 1 (vacuous for small alpha)."""
    return min(1.0, 2.0 * math.exp(-alpha * alpha / 2.0))


def initialization_bound(n, p, k, alpha):
    """``(sqrt(n-p) + sqrt(p) + alpha) / (sqrt(p) - sqrt(k) - alpha)``."""
    if not 0 < k < p <= n:
        raise DimensionError(f"need 0 < k < p <= n, got n={n}, p={p}, k={k}")
    denom = math.sqrt(p) - math.sqrt(k) - alpha
    if denom <= 0.0:
        raise InvalidAlphaError(
            f"sqrt(p) - sqrt(k) - alpha = {denom:.6g} must be positive (alpha={alpha})"
        )
    return (math.sqrt(n - p) + math.sqrt(p) + alpha) / denom


def construct_Z(U, X, k):
    """p x k orthonormal ``Z`` with ``u_i^T X Z = 0`` for ``i = k+1..p``.

    ``Z`` is the trailing right singular vectors of the block of rows
    ``k..p-1`` of ``U^T X`` (zero padded to a square so all ``p`` right
    singular vectors are available).
    """
    U = as_matrix(U, "U")
    X = as_matrix(X, "X")
    n, p = X.shape
    if U.shape != (n, n):
        raise DimensionError(f"U must be {n}x{n}, got {U.shape[0]}x{U.shape[1]}")
    if not 0 < k < p:
        raise DimensionError(f"need 0 < k < p, got k={k}, p={p}")
    if p > n:
        raise DimensionError(f"need p <= n, got p={p}, n={n}")
    check_orthonormal(U, 1e-8, "U")
    C2 = U[:, k:p].T @ X
    padded = np.zeros((p, p))
    padded[: p - k] = C2
    V = svd_reference(padded).V
    return np.asfortranarray(V[:, p - k:])


def tan_angle_kdim(U_k, W):
    """Largest principal-angle tangent between range(U_k) and range(W).

    Computed as ``||(Q_W - U_k B) B^{-1}||_2`` with ``B = U_k^T Q_W``, which
    equals ``||U_{-k}^T Q_W B^{-1}||_2`` without needing the complement.
    Returns :data:`ANGLE_OVERFLOW` when ``B`` is singular to 1e-12.
    """
    U_k = as_matrix(U_k, "U_k")
    W = as_matrix(W, "W")
    if U_k.shape != W.shape:
        raise DimensionError(f"U_k is {U_k.shape}, W is {W.shape}; shapes must match")
    Q, _ = qr_thin(W)
    B = U_k.T @ Q
    f = svd_reference(B)
    if f.sigma[-1] <= SINGULAR_TOL:
        return ANGLE_OVERFLOW
    B_inv = (f.V / f.sigma) @ f.U.T
    T = (Q - U_k @ B) @ B_inv
    return float(svd_reference(T).sigma[0])


@dataclass(frozen=True)
class InitializationReport:
    Z: np.ndarray
    tan_theta_XZ: float
    theoretical_bound: float
    alpha: float
    failure_probability: float
    X: np.ndarray = None
    nullspace_residual: float = 0.0


def initialize(U, n, p, k, alpha, seed):
    """Draw a Gaussian ``X`` (n x p), build ``Z`` and measure tan(U_k, XZ)."""
    bound = initialization_bound(n, p, k, alpha)
    U = as_matrix(U, "U")
    X = gaussian_matrix(n, p, seed)
    Z = construct_Z(U, X, k)
    resid = float(np.max(np.abs(U[:, k:p].T @ X @ Z)))
    tan = tan_angle_kdim(U[:, :k], X @ Z)
    return InitializationReport(
        Z=Z,
        tan_theta_XZ=tan,
        theoretical_bound=bound,
        alpha=float(alpha),
        failure_probability=failure_probability(alpha),
        X=X,
        nullspace_residual=resid,
    )

"""Randomized sketches: subspace (power) iteration and block Krylov.

Both start from ``M X`` with a Gaussian ``X``; the sketch basis ``Q`` is
then turned into a rank-``k`` approximation ``Q (Q^T M)_k``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EmptyBasisError
from .linalg import (
    as_matrix,
    frobenius_norm,
    orthonormal_range,
    qr_thin,
    rank_k_project_F,
    spectral_norm,
)
from .randinit import gaussian_matrix

DROP_TOL = 1e-10
METHODS = ("power", "lanczos")


def _check_start(M, X):
    M = as_matrix(M, "M")
    X = as_matrix(X, "X")
    if M.shape[1] != X.shape[0]:
        raise DimensionError(f"M is {M.shape[0]}x{M.shape[1]} but X has {X.shape[0]} rows")
    return M, X


def power_iterate(M, X, t):
    """Orthonormal basis of range((M M^T)^t M X), re-orthonormalized after
    every multiplication by ``M`` or ``M^T``."""
    M, X = _check_start(M, X)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    Y, _ = qr_thin(M @ X)
    for _ in range(t):
        Z, _ = qr_thin(M.T @ Y)
        Y, _ = qr_thin(M @ Z)
    return Y


@dataclass(frozen=True)
class KrylovBasis:
    """Block Krylov basis.

    ``blocks[j]`` holds the orthonormal directions that degree ``j``
    contributed beyond degrees ``0..j-1`` (possibly zero columns), so
    ``range(blocks[0..j]) = range([MX, ..., (MM^T)^j MX])`` and ``Q`` is
    their concatenation.
    """

    blocks: list
    Q: np.ndarray
    degree: int
    block_size: int
    dropped: int = 0

    @property
    def rank(self):
        return self.Q.shape[1]


def _orthogonalize_against(Q, W):
    # classical Gram-Schmidt, two passes
    W = W - Q @ (Q.T @ W)
    return W - Q @ (Q.T @ W)


def block_krylov(M, B, d):
    """Orthonormal basis of ``[B, (MM^T) B, ..., (MM^T)^d B]`` for an m x p start ``B``.

    Each degree multiplies only the directions added at the previous degree,
    projects out the accumulated basis (two Gram-Schmidt passes), and keeps
    the directions whose singular value exceeds ``1e-10`` times the
    Frobenius norm of the raw block. Discarded directions are counted in
    ``dropped``.
    """
    M = as_matrix(M, "M")
    B = as_matrix(B, "B")
    if B.shape[0] != M.shape[0]:
        raise DimensionError(f"M has {M.shape[0]} rows but the start block has {B.shape[0]}")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    m, p = B.shape
    if frobenius_norm(B) == 0.0:
        raise EmptyBasisError("every column of the start block vanishes")
    Q = np.zeros((m, 0), order="F")
    blocks = []
    cur = B
    for j in range(d + 1):
        if j > 0:
            newest = blocks[-1]
            cur = M @ (M.T @ newest) if newest.shape[1] else np.zeros((m, 0))
        scale = frobenius_norm(cur)
        if cur.shape[1] == 0 or scale == 0.0:
            new = np.zeros((m, 0), order="F")
        else:
            new = orthonormal_range(_orthogonalize_against(Q, cur), DROP_TOL * scale)
            if new.shape[1]:
                new, _ = qr_thin(_orthogonalize_against(Q, new))
        blocks.append(new)
        Q = np.asfortranarray(np.hstack([Q, new]))
    dropped = (d + 1) * p - Q.shape[1]
    return KrylovBasis(blocks=blocks, Q=Q, degree=d, block_size=p, dropped=dropped)


def build_krylov(M, X, d):
    """Block Krylov basis of ``[MX, (MM^T) MX, ..., (MM^T)^d MX]`` (see :func:`block_krylov`)."""
    M, X = _check_start(M, X)
    try:
        return block_krylov(M, M @ X, d)
    except EmptyBasisError:
        raise EmptyBasisError("every column of M X vanishes") from None


@dataclass(frozen=True)
class SketchResult:
    Q_sketch: np.ndarray
    approx_k: np.ndarray
    spectral_err_sq: float
    frobenius_err_sq: float
    iterations_used: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def extract_rank_k(M, Q, k, iterations_used=0):
    """Rank-``k`` approximation ``Q (Q^T M)_k`` and its squared errors."""
    M = as_matrix(M, "M")
    approx = rank_k_project_F(Q, M, k)
    R = M - approx
    return SketchResult(
        Q_sketch=np.asfortranarray(Q),
        approx_k=approx,
        spectral_err_sq=spectral_norm(R) ** 2,
        frobenius_err_sq=frobenius_norm(R) ** 2,
        iterations_used=int(iterations_used),
    )


def sketch_basis(M, X, method, count):
    """Orthonormal sketch basis for ``method`` with ``count`` iterations/degree."""
    if method == "power":
        return power_iterate(M, X, count)
    if method == "lanczos":
        return build_krylov(M, X, count).Q
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def randomized_svd(M, k, p, method="lanczos", budget=0, seed=0):
    """Randomized rank-``k`` SVD sketch with block size ``p``.

    ``budget`` is an iteration count (power) or Krylov degree (lanczos),
    either as an int or as an object with a ``count`` attribute.
    """
    M = as_matrix(M, "M")
    m, n = M.shape
    if not 0 <= k <= p <= min(m, n):
        raise DimensionError(f"need k <= p <= min(m, n), got k={k}, p={p}, shape {m}x{n}")
    count = int(getattr(budget, "count", budget))
    if count < 0:
        raise ValueError(f"budget must be >= 0, got {count}")
    X = gaussian_matrix(n, p, seed)
    Q = sketch_basis(M, X, method, count)
    return extract_rank_k(M, Q, k, iterations_used=count)

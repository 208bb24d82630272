"""Dense linear-algebra substrate.

Matrices are plain 2-D ``float64`` numpy arrays; :func:`as_matrix` is the
single validation point (finite entries, two dimensions) and hands back a
Fortran-ordered array so that columns are contiguous for the kernels.

The reference SVD is a one-sided (Hestenes) Jacobi iteration. It is slow
compared to LAPACK but simple, deterministic, and accurate to a relative
orthogonality tolerance, which is what the verification harness needs.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionError,
    NoConvergenceError,
    NonFiniteError,
    NotOrthonormalError,
    RankDeficientError,
)

EPS = np.finfo(np.float64).eps
RANK_TOL = 1e-12
MAX_SWEEPS = 60


def as_matrix(A, name="matrix"):
    """Validate ``A`` and return it as a Fortran-ordered float64 array."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return np.asfortranarray(A)


@dataclass(frozen=True)
class SvdFactorization:
    """Thin SVD ``A = U diag(sigma) V^T`` with ``r = min(m, n)`` triplets.

    ``sigma`` is descending and nonnegative. Columns of ``U`` belonging to
    numerically zero singular values are an orthonormal completion, so
    ``U`` and ``V`` always have orthonormal columns.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def shape(self):
        return self.U.shape[0], self.V.shape[0]

    @property
    def rank(self):
        return len(self.sigma)

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.T


def frobenius_norm(A):
    A = np.asarray(A, dtype=np.float64)
    return float(np.sqrt(np.sum(A * A)))


def check_orthonormal(Q, tol=1e-8, name="Q"):
    Q = np.asarray(Q, dtype=np.float64)
    gram = Q.T @ Q
    gap = np.max(np.abs(gram - np.eye(Q.shape[1]))) if Q.shape[1] else 0.0
    if gap > tol:
        raise NotOrthonormalError(f"{name}: max|Q^T Q - I| = {gap:.3e} > {tol:g}")


def qr_thin(A):
    """Householder thin QR with ``diag(R) >= 0``.

    Raises :class:`RankDeficientError` when some ``|R[j, j]|`` is at most
    ``1e-12 * ||A||_F``; the caller has to drop dependent columns.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    if m < n:
        raise DimensionError(f"qr_thin needs rows >= cols, got {m}x{n}")
    if n == 0:
        return np.zeros((m, 0), order="F"), np.zeros((0, 0), order="F")
    Q, R = _kernels.householder_qr(np.array(A, order="F", copy=True))
    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    Q = np.asfortranarray(Q * signs)
    R = np.asfortranarray(R * signs[:, None])
    scale = frobenius_norm(A)
    diag = np.abs(np.diag(R))
    bad = np.flatnonzero(diag <= RANK_TOL * scale)
    if bad.size:
        raise RankDeficientError(
            f"column {bad[0]} of a {m}x{n} matrix is dependent "
            f"(|R_jj| = {diag[bad[0]]:.3e}, ||A||_F = {scale:.3e})"
        )
    return Q, R


def _rotate_columns(W, V, max_sweeps):
    """Run Jacobi on ``W`` (and ``V``) in place after a norm-descending presort.

    Columns whose norm falls to ``sqrt(m) * eps * ||W||_F`` are rounding
    noise; they are excluded from further rotations, otherwise the relative
    orthogonality test can never be met on rank-deficient input.
    """
    m = W.shape[0]
    tol = max(m, 4) * EPS
    floor = m * (EPS * frobenius_norm(W)) ** 2
    sweeps = _kernels.jacobi_sweeps(W, V, tol, max_sweeps, floor)
    if sweeps < 0:
        raise NoConvergenceError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")
    return sweeps


def _presorted(A):
    norms = np.einsum("ij,ij->j", A, A)
    order = np.argsort(-norms, kind="stable")
    return np.array(A[:, order], order="F"), order


def _complete_orthonormal(B, count):
    """Return ``count`` orthonormal columns orthogonal to those of ``B``."""
    m = B.shape[0]
    extra = np.zeros((m, 0))
    for _ in range(count):
        basis = np.hstack([B, extra])
        resid = np.eye(m) - basis @ basis.T
        resid -= basis @ (basis.T @ resid)
        norms = np.einsum("ij,ij->j", resid, resid)
        j = int(np.argmax(norms))
        col = resid[:, j] / np.sqrt(norms[j])
        extra = np.hstack([extra, col[:, None]])
    return extra


def _jacobi_factor(A, max_sweeps):
    m, n = A.shape
    W, order = _presorted(A)
    V = np.asfortranarray(np.eye(n)[:, order])
    _rotate_columns(W, V, max_sweeps)
    sigma = np.sqrt(np.einsum("ij,ij->j", W, W))
    order = np.argsort(-sigma, kind="stable")
    sigma, W, V = sigma[order], W[:, order], V[:, order]
    tiny = max(m, n) * EPS * (sigma[0] if n else 0.0)
    good = sigma > tiny
    if n and sigma[0] == 0.0:
        good[:] = False
    U = np.zeros((m, n))
    U[:, good] = W[:, good] / sigma[good]
    nbad = int(n - good.sum())
    if nbad:
        U[:, ~good] = _complete_orthonormal(U[:, good], nbad)
    return U, sigma, V


def _fix_signs(U, V):
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.where(U[idx, np.arange(U.shape[1])] < 0.0, -1.0, 1.0)
    return U * signs, V * signs


def svd_reference(A, max_sweeps=MAX_SWEEPS):
    """Deterministic thin SVD by one-sided Jacobi rotations.

    Columns are rotated until every pair of numerically nonzero columns
    satisfies ``|a_i . a_j| <= max(m, 4) * eps * ||a_i|| ||a_j||``, which bounds the
    off-diagonal Gram residual far below ``1e-12 ||A||_F^2``. Wide inputs
    are factored through their transpose. The largest-magnitude entry of
    every ``U`` column is made positive.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    if m == 0 or n == 0:
        raise DimensionError("svd_reference needs a nonempty matrix")
    if m >= n:
        U, sigma, V = _jacobi_factor(A, max_sweeps)
    else:
        V, sigma, U = _jacobi_factor(np.asfortranarray(A.T), max_sweeps)
    U, V = _fix_signs(U, V)
    return SvdFactorization(np.asfortranarray(U), sigma, np.asfortranarray(V))


def singular_values(A, max_sweeps=MAX_SWEEPS):
    """Singular values only (no vector accumulation), descending."""
    A = as_matrix(A, "A")
    if A.shape[0] < A.shape[1]:
        A = np.asfortranarray(A.T)
    if A.size == 0:
        raise DimensionError("singular_values needs a nonempty matrix")
    W, _ = _presorted(A)
    _rotate_columns(W, np.zeros((0, 0), order="F"), max_sweeps)
    return np.sort(np.sqrt(np.einsum("ij,ij->j", W, W)))[::-1]


def spectral_norm(A):
    return float(singular_values(A)[0])


def orthonormal_range(A, tol):
    """Orthonormal basis of the directions of ``A`` with singular value > ``tol``.

    Rank revealing: the basis is ``A V`` normalized, ``V`` the Jacobi
    rotations, keeping only columns whose norm exceeds ``tol``.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    if n == 0:
        return np.zeros((m, 0), order="F")
    W, _ = _presorted(A)
    _rotate_columns(W, np.zeros((0, 0), order="F"), MAX_SWEEPS)
    norms = np.sqrt(np.einsum("ij,ij->j", W, W))
    order = np.argsort(-norms, kind="stable")
    keep = [j for j in order if norms[j] > tol]
    return np.asfortranarray(W[:, keep] / norms[keep])


def truncate(svd, k):
    """Materialize the best rank-``k`` approximation ``U_k diag(s_k) V_k^T``."""
    if not 0 <= k <= svd.rank:
        raise DimensionError(f"k={k} outside [0, {svd.rank}]")
    return (svd.U[:, :k] * svd.sigma[:k]) @ svd.V[:, :k].T


def _independent_columns(C):
    scale = frobenius_norm(C)
    basis = np.zeros((C.shape[0], 0))
    keep = []
    for j in range(C.shape[1]):
        r = C[:, j] - basis @ (basis.T @ C[:, j])
        r -= basis @ (basis.T @ r)
        nr = np.linalg.norm(r)
        if nr > RANK_TOL * scale and nr > 0.0:
            keep.append(j)
            basis = np.hstack([basis, (r / nr)[:, None]])
    return keep


def project_onto_range(C, M):
    """Return ``C C^+ M``, the orthogonal projection of ``M`` onto range(C).

    Dependent columns of ``C`` are pruned first; only a ``C`` with no
    usable column raises :class:`RankDeficientError`.
    """
    C = as_matrix(C, "C")
    M = as_matrix(M, "M")
    if C.shape[0] != M.shape[0]:
        raise DimensionError(f"C has {C.shape[0]} rows, M has {M.shape[0]}")
    try:
        Q, _ = qr_thin(C)
    except (RankDeficientError, DimensionError):
        keep = _independent_columns(C)
        if not keep:
            raise RankDeficientError("C has no independent column") from None
        Q, _ = qr_thin(C[:, keep])
    return Q @ (Q.T @ M)


def rank_k_project_F(Q, M, k):
    """Frobenius-optimal rank-``k`` approximation of ``M`` within range(Q)."""
    Q = as_matrix(Q, "Q")
    M = as_matrix(M, "M")
    check_orthonormal(Q, 1e-8)
    if Q.shape[0] != M.shape[0]:
        raise DimensionError(f"Q has {Q.shape[0]} rows, M has {M.shape[0]}")
    if not 0 <= k <= Q.shape[1]:
        raise DimensionError(f"k={k} outside [0, {Q.shape[1]}]")
    if k == 0:
        return np.zeros(M.shape)
    return Q @ truncate(svd_reference(Q.T @ M), k)

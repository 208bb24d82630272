# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Hestenes one-sided Jacobi and Householder QR.

All arrays are Fortran-ordered float64 so that a column is a contiguous
stride-1 vector handed straight to BLAS level-1 routines.
"""
from libc.math cimport sqrt, fabs
from scipy.linalg.cython_blas cimport ddot, drot, dnrm2, daxpy

import numpy as np


def jacobi_sweeps(double[::1, :] A, double[::1, :] V, double tol, int max_sweeps,
                  double floor=0.0):
    """Orthogonalize the columns of ``A`` in place by plane rotations.

    Rotations are accumulated into ``V`` when it has as many rows as ``A``
    has columns; pass a 0x0 array to skip accumulation. Pairs involving a
    column whose squared norm is at most ``floor`` are left alone (such
    columns are numerically zero). Returns the number
    of sweeps performed, or -1 if ``max_sweeps`` passed without a
    rotation-free sweep.
    """
    cdef int m = A.shape[0]
    cdef int n = A.shape[1]
    cdef int nv = V.shape[0]
    cdef bint accumulate = nv == n and n > 0
    cdef int one = 1
    cdef int i, j, sweep, rotations
    cdef int result = -1
    cdef double alpha, beta, gamma, zeta, t, c, s, ms
    cdef double[::1] norms = np.empty(n, dtype=np.float64)

    if n < 2:
        return 0
    with nogil:
        for sweep in range(max_sweeps):
            for i in range(n):
                norms[i] = ddot(&m, &A[0, i], &one, &A[0, i], &one)
            rotations = 0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    alpha = norms[i]
                    beta = norms[j]
                    if alpha <= floor or beta <= floor or alpha == 0.0 or beta == 0.0:
                        continue
                    gamma = ddot(&m, &A[0, i], &one, &A[0, j], &one)
                    if fabs(gamma) <= tol * sqrt(alpha) * sqrt(beta):
                        continue
                    rotations += 1
                    zeta = (beta - alpha) / (2.0 * gamma)
                    if zeta >= 0.0:
                        t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                    else:
                        t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = c * t
                    # drot is x' = c x + s y, y' = c y - s x; we want
                    # a_i <- c a_i - s a_j, a_j <- s a_i + c a_j
                    ms = -s
                    drot(&m, &A[0, i], &one, &A[0, j], &one, &c, &ms)
                    if accumulate:
                        drot(&nv, &V[0, i], &one, &V[0, j], &one, &c, &ms)
                    norms[i] = alpha - t * gamma
                    norms[j] = beta + t * gamma
            if rotations == 0:
                result = sweep + 1
                break
    return result


def householder_qr(double[::1, :] A):
    """Thin Householder QR of a tall matrix, overwriting ``A``.

    Returns ``(Q, R)`` with ``Q`` m x n and ``R`` n x n upper triangular.
    Diagonal signs are whatever the reflectors produce.
    """
    cdef int m = A.shape[0]
    cdef int n = A.shape[1]
    cdef int one = 1
    cdef int i, j, c, length
    cdef double normx, alpha, x0, vnorm2, tau, s
    cdef double[::1] taus = np.zeros(n, dtype=np.float64)
    cdef double[::1, :] Vh = np.zeros((m, n), dtype=np.float64, order="F")
    cdef double[::1, :] R = np.zeros((n, n), dtype=np.float64, order="F")
    cdef double[::1, :] Q = np.zeros((m, n), dtype=np.float64, order="F")

    with nogil:
        for j in range(n):
            length = m - j
            normx = dnrm2(&length, &A[j, j], &one)
            if normx == 0.0:
                taus[j] = 0.0
                R[j, j] = 0.0
                for c in range(j + 1, n):
                    R[j, c] = A[j, c]
                continue
            x0 = A[j, j]
            alpha = -normx if x0 >= 0.0 else normx
            for i in range(j, m):
                Vh[i, j] = A[i, j]
            Vh[j, j] = x0 - alpha
            vnorm2 = ddot(&length, &Vh[j, j], &one, &Vh[j, j], &one)
            tau = 2.0 / vnorm2 if vnorm2 > 0.0 else 0.0
            taus[j] = tau
            R[j, j] = alpha
            for c in range(j + 1, n):
                s = -tau * ddot(&length, &Vh[j, j], &one, &A[j, c], &one)
                daxpy(&length, &s, &Vh[j, j], &one, &A[j, c], &one)
                R[j, c] = A[j, c]
        for j in range(n):
            Q[j, j] = 1.0
        for j in range(n - 1, -1, -1):
            tau = taus[j]
            if tau == 0.0:
                continue
            length = m - j
            for c in range(j, n):
                s = -tau * ddot(&length, &Vh[j, j], &one, &Q[j, c], &one)
                daxpy(&length, &s, &Vh[j, j], &one, &Q[j, c], &one)
    return np.asarray(Q), np.asarray(R)

"""Numpy fallback for the compiled kernels.

Same algorithms, same argument conventions, same in-place contract as
``_ckernels``; each rotation or reflector is one vectorized update.
"""
import math

import numpy as np


def jacobi_sweeps(A, V, tol, max_sweeps, floor=0.0):
    m, n = A.shape
    accumulate = V.shape[0] == n and n > 0
    if n < 2:
        return 0
    for sweep in range(max_sweeps):
        norms = np.einsum("ij,ij->j", A, A)
        rotations = 0
        for i in range(n - 1):
            ai = A[:, i]
            for j in range(i + 1, n):
                alpha = norms[i]
                beta = norms[j]
                if alpha <= floor or beta <= floor or alpha == 0.0 or beta == 0.0:
                    continue
                aj = A[:, j]
                gamma = float(ai @ aj)
                if abs(gamma) <= tol * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                rotations += 1
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * ai - s * aj
                A[:, j] = s * ai + c * aj
                A[:, i] = new_i
                if accumulate:
                    vi = V[:, i].copy()
                    V[:, i] = c * vi - s * V[:, j]
                    V[:, j] = s * vi + c * V[:, j]
                norms[i] = alpha - t * gamma
                norms[j] = beta + t * gamma
        if rotations == 0:
            return sweep + 1
    return -1


def householder_qr(A):
    m, n = A.shape
    taus = np.zeros(n)
    Vh = np.zeros((m, n), order="F")
    R = np.zeros((n, n), order="F")
    for j in range(n):
        x = A[j:, j]
        normx = float(np.sqrt(x @ x))
        if normx == 0.0:
            R[j, j + 1:] = A[j, j + 1:]
            continue
        x0 = x[0]
        alpha = -normx if x0 >= 0.0 else normx
        v = x.copy()
        v[0] = x0 - alpha
        vnorm2 = float(v @ v)
        tau = 2.0 / vnorm2 if vnorm2 > 0.0 else 0.0
        Vh[j:, j] = v
        taus[j] = tau
        R[j, j] = alpha
        if j + 1 < n:
            block = A[j:, j + 1:]
            block -= np.outer(v, tau * (v @ block))
            R[j, j + 1:] = A[j, j + 1:]
    Q = np.zeros((m, n), order="F")
    Q[np.arange(n), np.arange(n)] = 1.0
    for j in range(n - 1, -1, -1):
        tau = taus[j]
        if tau == 0.0:
            continue
        v = Vh[j:, j]
        block = Q[j:, j:]
        block -= np.outer(v, tau * (v @ block))
    return Q, R

"""Synthetic test matrices with prescribed singular values."""
from dataclasses import dataclass, field

import numpy as np

from ..linalg import SvdFactorization, qr_thin
from ..randinit import gaussian_matrix

KINDS = ("geometric", "polynomial", "step", "explicit")


@dataclass(frozen=True)
class SpectrumSpec:
    """Singular-value law plus shape and seed.

    geometric: ``leading * ratio^(i-1)``; polynomial: ``leading * i^(-exponent)``;
    step: ``leading`` for ``i <= gap_position`` and ``leading / gap_ratio``
    after; explicit: ``values`` zero-padded to ``min(m, n)``.
    """

    kind: str
    m: int
    n: int
    seed: int = 0
    ratio: float = 0.5
    exponent: float = 1.0
    gap_position: int = 1
    gap_ratio: float = 2.0
    values: tuple = field(default_factory=tuple)
    leading: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}; expected one of {KINDS}")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"shape must be positive, got {self.m}x{self.n}")


def spectrum_values(spec, length=None):
    """Descending singular values of ``spec`` (``length`` defaults to min(m, n))."""
    r = min(spec.m, spec.n) if length is None else length
    i = np.arange(1, r + 1, dtype=np.float64)
    if spec.kind == "geometric":
        if not 0.0 < spec.ratio <= 1.0:
            raise ValueError(f"geometric ratio must be in (0, 1], got {spec.ratio}")
        s = spec.leading * spec.ratio ** (i - 1.0)
    elif spec.kind == "polynomial":
        if spec.exponent < 0.0:
            raise ValueError(f"exponent must be >= 0, got {spec.exponent}")
        s = spec.leading * i ** (-spec.exponent)
    elif spec.kind == "step":
        if spec.gap_ratio < 1.0:
            raise ValueError(f"gap_ratio must be >= 1, got {spec.gap_ratio}")
        s = np.where(i <= spec.gap_position, spec.leading, spec.leading / spec.gap_ratio)
    else:
        vals = np.asarray(spec.values, dtype=np.float64)
        if vals.size > r:
            raise ValueError(f"{vals.size} explicit values exceed min(m, n) = {r}")
        if np.any(vals < 0.0) or np.any(np.diff(vals) > 0.0):
            raise ValueError("explicit values must be nonnegative and descending")
        s = np.zeros(r)
        s[: vals.size] = vals
    if spec.kind != "explicit" and not (np.all(np.isfinite(s)) and np.all(s > 0.0)):
        raise ValueError("spectrum underflowed to zero or overflowed; adjust parameters")
    return s


def _subseed(seed, j):
    ss = np.random.SeedSequence([int(seed), j])
    return int(ss.generate_state(1, np.uint64)[0])


def random_orthogonal(n, seed):
    """Q factor of a seeded n x n Gaussian matrix."""
    Q, _ = qr_thin(gaussian_matrix(n, n, seed))
    return Q


def synth_factors(spec):
    """Return ``(M, svd)`` with ``M = U diag(sigma) V^T`` and the exact factors.

    ``svd.U`` is m x m and ``svd.V`` is n x n (full orthogonal); ``sigma``
    has ``min(m, n)`` entries, so only the leading columns carry weight.
    """
    sigma = spectrum_values(spec)
    U = random_orthogonal(spec.m, _subseed(spec.seed, 0))
    V = random_orthogonal(spec.n, _subseed(spec.seed, 1))
    r = sigma.size
    M = (U[:, :r] * sigma) @ V[:, :r].T
    return np.asfortranarray(M), SvdFactorization(U, sigma, V)


def synth_matrix(spec):
    return synth_factors(spec)[0]

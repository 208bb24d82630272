"""Kernel backend selection.

The Cython extension is used when it was built; otherwise, or when the
environment variable ``KRYLOVSVD_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used. ``BACKEND`` names the choice
and ``BACKENDS`` maps every importable backend name to its module.
"""
import os

from . import _pykernels

BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
except ImportError:  # extension not built
    pass
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("KRYLOVSVD_PURE_PYTHON", "") not in ("", "0"):
    BACKEND = "python"
else:
    BACKEND = "cython" if "cython" in BACKENDS else "python"

_impl = BACKENDS[BACKEND]
jacobi_sweeps = _impl.jacobi_sweeps
householder_qr = _impl.householder_qr

__all__ = ["BACKEND", "BACKENDS", "jacobi_sweeps", "householder_qr"]

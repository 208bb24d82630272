"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

Each kernel runs on the same Fortran-ordered Gaussian input for every
available backend; the best-of-``repeat`` wall time is reported together
with the largest entrywise difference between backend outputs.
"""
import argparse
import time

import numpy as np

from krylovsvd import _kernels
from krylovsvd.linalg import EPS


def _jacobi(mod, A):
    W = A.copy(order="F")
    V = np.asfortranarray(np.eye(A.shape[1]))
    mod.jacobi_sweeps(W, V, max(A.shape[0], 4) * EPS, 60)
    return W


def _qr(mod, A):
    return mod.householder_qr(A.copy(order="F"))[0]


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    names = sorted(_kernels.BACKENDS)
    print(f"backends: {', '.join(names)} (default: {_kernels.BACKEND})")
    print(f"{'kernel':<8}{'n':>6}" + "".join(f"{b + ' [s]':>16}" for b in names)
          + f"{'speedup':>10}{'max diff':>12}")
    rng = np.random.default_rng(0)
    for n in args.sizes:
        A = np.asfortranarray(rng.standard_normal((n, n)))
        for label, kernel in (("jacobi", _jacobi), ("qr", _qr)):
            times, outs = [], []
            for b in names:
                t, out = best_of(lambda: kernel(_kernels.BACKENDS[b], A), args.repeat)
                times.append(t)
                outs.append(out)
            diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
            speed = times[names.index("python")] / min(times) if len(names) > 1 else 1.0
            print(f"{label:<8}{n:>6}" + "".join(f"{t:>16.4f}" for t in times)
                  + f"{speed:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()

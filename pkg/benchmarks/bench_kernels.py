"""Time the numba and pure-numpy versions of each hot kernel.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both versions are always importable from ``dynamide.kernels.KERNELS``; the
numba column is skipped when numba is not installed.  The first numba call
per kernel (compilation or cache load) is excluded from the timings.
"""
import argparse
import math
import time

import numpy as np

from dynamide import _accel
from dynamide.kernels import KERNELS


def _cases():
    n = 64
    x = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    um, up = -0.5 * np.cos(x), 0.5 * np.cos(x)
    zero = np.zeros(n)
    yield "verlet_chain", (um, up, zero, zero, 1.0, 1.0, 1.0, 1e-3, 20_000, 10)
    yield "rk4_two_level", (2 ** -0.5 + 0j, 2 ** -0.5 + 0j, 2.0 / 3.0, 1.5e-3, 20_000)
    w = np.array([0.0, 1.0, 1.0 + math.sqrt(2.0)])
    d = np.array([[0, 1, 0.3], [1, 0, 0.6j], [0.3, -0.6j, 0]], dtype=np.complex128) * 0.1
    d3 = np.zeros((3, 3, 3), dtype=np.complex128)
    d3[:, :, 0] = d
    g = np.einsum("nsj,snj->ns", d3, d3).real
    rr = np.einsum("lkj,snj->lksn", d3, d3)
    lam0 = np.array([0.3, 0.5, 0.81], dtype=np.complex128)
    lam0 /= np.linalg.norm(lam0)
    yield "rk4_secular", (lam0, w, g, 2.0 / 3.0, 0.01, 20_000, 10)
    yield "rk4_full", (lam0, w, rr, 2.0 / 3.0, 0.0, 0.01, 20_000, 10)
    yield "rk4_driven", (np.zeros(3), np.zeros(3), np.array([1.0, 0, 0]), np.zeros(3), 1.0, 1.0, 1e-3, 1.0,
                         0.04, 50_000, 10, 0)


def _best(fn, args, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"numba available: {_accel.HAVE_NUMBA}; default backend: {_accel.backend_name()}")
    print(f"{'kernel':16s} {'numpy [s]':>11s} {'numba [s]':>11s} {'speedup':>8s}")
    for name, case in _cases():
        nb, npf = KERNELS[name]
        t_np = _best(npf, case, args.repeat)
        if _accel.HAVE_NUMBA:
            nb(*case)  # compile or load from cache
            t_nb = _best(nb, case, args.repeat)
            print(f"{name:16s} {t_np:11.4f} {t_nb:11.4f} {t_np / t_nb:8.1f}")
        else:
            print(f"{name:16s} {t_np:11.4f} {'-':>11s} {'-':>8s}")


if __name__ == "__main__":
    main()

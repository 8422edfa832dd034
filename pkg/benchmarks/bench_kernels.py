"""Compare the numba and pure-numpy versions of each hot kernel.

    python benchmarks/bench_kernels.py [--repeat 5]

Both versions are called on identical inputs; the table shows the best
wall time of ``--repeat`` runs and the largest difference between outputs.
The first numba call (compilation or cache load) is timed separately.
Run with ``REGLAB_NO_NUMBA=1`` to see the fallback on its own.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from reglab import _accel, lseries, mahler, specfun


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(1)
    theta = rng.uniform(0, np.pi, 200_000)
    c = np.ascontiguousarray(2 * np.cos(theta) + 5.0 + 0j)
    z = np.ascontiguousarray(rng.normal(size=100_000) * 2 + 1j * rng.normal(size=100_000) * 2)
    n = 512
    j = np.arange(n)
    cx = np.ascontiguousarray(2 * np.cos(2 * np.pi * (j + 0.5) / n) + 0j)
    cy = np.ascontiguousarray(2 * np.cos(2 * np.pi * (j + 0.25) / n) + 0j)
    p = 1_000_003
    return [
        ("mahler integrand (2e5 pts)", mahler._logplus_numba, mahler._logplus_numpy, (c,)),
        ("torus grid 512^2", mahler._grid_numba, mahler._grid_numpy, (cx, cy, 3.0 + 0j)),
        ("Bloch-Wigner (1e5 pts)", specfun._bw_array_numba, specfun._bw_array_numpy, (z, specfun._COEF)),
        ("character sum p=1000003", lseries._charsum_numba, lseries._charsum_numpy, (p, 4, 5, 7, 11)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"numba available: {_accel.HAVE_NUMBA}, in use: {_accel.USE_NUMBA}")
    print(f"{'kernel':28s} {'first numba':>12s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s} {'max diff':>9s}")
    for name, fast, slow, inputs in cases():
        t_np, out_np = _best(lambda: slow(*inputs), args.repeat)
        if _accel.USE_NUMBA:
            t0 = time.perf_counter()
            fast(*inputs)
            first = time.perf_counter() - t0
            t_nb, out_nb = _best(lambda: fast(*inputs), args.repeat)
            diff = float(np.max(np.abs(np.asarray(out_nb) - np.asarray(out_np))))
            print(
                f"{name:28s} {first * 1e3:10.1f}ms {t_nb * 1e3:8.2f}ms {t_np * 1e3:8.2f}ms"
                f" {t_np / t_nb:7.1f}x {diff:9.1e}"
            )
        else:
            print(f"{name:28s} {'-':>12s} {'-':>10s} {t_np * 1e3:8.2f}ms {'-':>8s} {'-':>9s}")


if __name__ == "__main__":
    main()

"""Time the compiled and pure-numpy kernels side by side.

    python benchmarks/bench_kernels.py [--points N] [--steps N] [--repeat R]

Both paths are called directly, so NONRECIP_JIT does not matter here. The
first compiled call is excluded from timing.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nonrecip import _kernels
from nonrecip.dynamics import build_linear_system, default_dt
from nonrecip.params import TWO_PI_MHZ, SystemParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def transmittance_case(n):
    p = SystemParams()
    oc = np.geomspace(10, 5000, n) * TWO_PI_MHZ
    kv = np.linspace(0, p.k * 500, n)
    g = np.full(n, p.g)
    dp = np.zeros(n)
    tail = (p.kappa1, p.kappa2, p.kappa, p.gamma3, p.gamma12, 0.0, 1.0, 2.0)
    return (g, oc, dp, kv, *tail)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=1_000_000)
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"numba available: {_kernels.HAVE_NUMBA}")
    rows = []

    targs = transmittance_case(args.points)
    np_t = best_of(lambda: _kernels._transmittance_numpy(*targs), args.repeat)
    rows.append((f"transmittance ({args.points} points)", np_t, None))

    s = build_linear_system(SystemParams(), "counter")
    y0 = np.zeros(3, complex)
    dt = default_dt(s)
    rargs = (np.ascontiguousarray(s.drift), s.drive.copy(), y0, dt, args.steps, 1000)
    np_r = best_of(lambda: _kernels._rk4_numpy(*rargs), max(1, args.repeat // 2))
    rows.append((f"rk4 ({args.steps} steps)", np_r, None))

    if _kernels.HAVE_NUMBA:
        _kernels._transmittance_jit(*transmittance_case(4))
        _kernels._rk4_jit(*rargs[:4], 10, 1)
        rows[0] = (rows[0][0], np_t, best_of(lambda: _kernels._transmittance_jit(*targs), args.repeat))
        rows[1] = (rows[1][0], np_r, best_of(lambda: _kernels._rk4_jit(*rargs), args.repeat))

    print(f"{'kernel':32s} {'numpy [s]':>11s} {'numba [s]':>11s} {'speedup':>8s}")
    for name, a, b in rows:
        if b is None:
            print(f"{name:32s} {a:11.4f} {'-':>11s} {'-':>8s}")
        else:
            print(f"{name:32s} {a:11.4f} {b:11.4f} {a / b:8.1f}x")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba and numpy log-convolution paths against each other,
and the Kronecker-packed exact convolution against schoolbook.

Usage: python benchmarks/bench_kernels.py [--sizes 512,2048,8192] [--repeats 3]
"""

import argparse
import random
import time

import numpy as np

from hannerfaces import _kernels


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_log_convolve(sizes, repeats):
    print("log-domain convolution (seconds, best of repeats)")
    header = f"{'K':>8} {'numpy':>12}"
    if _kernels._HAS_NUMBA:
        header += f" {'numba':>12} {'speedup':>9}"
    print(header)
    rng = np.random.default_rng(1)
    for n in sizes:
        f = rng.uniform(0, 1000, n)
        g = rng.uniform(0, 1000, n)
        t_np = time_call(_kernels._log_convolve_numpy, f, g, repeats=repeats)
        line = f"{n:>8} {t_np:>12.4f}"
        if _kernels._HAS_NUMBA:
            _kernels._log_convolve_jit(f[:4], g[:4])  # compile outside the timer
            t_nb = time_call(_kernels._log_convolve_jit, f, g, repeats=repeats)
            line += f" {t_nb:>12.4f} {t_np / t_nb:>8.1f}x"
        print(line)


def bench_exact_convolve(sizes, repeats):
    print()
    print("exact big-integer convolution, 4096-bit coefficients "
          f"(gmpy2 {'on' if _kernels._HAS_GMPY2 else 'off'})")
    print(f"{'K':>8} {'schoolbook':>12} {'kronecker':>12} {'speedup':>9}")
    rng = random.Random(2)
    for n in sizes:
        if n > 1024:
            continue  # schoolbook becomes pointless to wait for
        f = [rng.randrange(0, 2**4096) for _ in range(n)]
        g = [rng.randrange(0, 2**4096) for _ in range(n)]
        t_slow = time_call(_kernels.convolve_schoolbook, f, g, n, repeats=repeats)
        t_fast = time_call(_kernels.convolve_exact, f, g, n, repeats=repeats)
        print(f"{n:>8} {t_slow:>12.4f} {t_fast:>12.4f} {t_slow / t_fast:>8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="512,2048,8192")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_log_convolve(sizes, args.repeats)
    bench_exact_convolve(sizes, args.repeats)


if __name__ == "__main__":
    main()

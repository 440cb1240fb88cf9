#!/usr/bin/env python3
"""Benchmark the compiled distance kernel against the NumPy fallback.

Runs the pairwise pseudometric block kernel on synthetic coordinate
matrices at several sizes and prints a timing table. Both backends
produce bitwise-identical output, which is asserted on the smallest case.

Usage: python benchmarks/bench_kernels.py [--csv out.csv]
"""

import argparse
import time

import numpy as np

from spectral_hull import _kernels_py

try:
    from spectral_hull import _kernels

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False

CASES = [
    (256, 16),
    (1024, 32),
    (2048, 64),
    (4097, 109),  # the shift example at acceptance scale
]


def timed(fn, w, V, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(w, V, 0, V.shape[0])
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--csv", default=None)
    parser.add_argument("--repeats", type=int, default=2)
    args = parser.parse_args()

    rng = np.random.default_rng(12345)
    rows = []
    print(f"{'atoms':>6} {'terms':>6} {'numpy (s)':>12} {'compiled (s)':>13} {'speedup':>8}")
    for n, m in CASES:
        V = np.ascontiguousarray(
            np.exp(2j * np.pi * rng.random((n, m)))
        )
        w = np.ascontiguousarray(np.exp2(-1.5 * np.arange(1, m + 1)))
        if n <= 256:
            a = _kernels_py.pairwise_block(w, V, 0, n)
            if HAVE_COMPILED:
                b = _kernels.pairwise_block(w, V, 0, n)
                assert np.array_equal(a, b), "backends diverged"
        t_py = timed(_kernels_py.pairwise_block, w, V, args.repeats)
        if HAVE_COMPILED:
            t_c = timed(_kernels.pairwise_block, w, V, args.repeats)
            speedup = t_py / t_c
            print(f"{n:>6} {m:>6} {t_py:>12.4f} {t_c:>13.4f} {speedup:>8.2f}")
        else:
            t_c, speedup = float("nan"), float("nan")
            print(f"{n:>6} {m:>6} {t_py:>12.4f} {'n/a':>13} {'n/a':>8}")
        rows.append((n, m, t_py, t_c, speedup))

    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("atoms,terms,numpy_s,compiled_s,speedup\n")
            for row in rows:
                fh.write(",".join(f"{v:.6g}" for v in row) + "\n")
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()

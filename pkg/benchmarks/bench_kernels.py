#!/usr/bin/env python3
"""Benchmark the compiled alignment kernels against the pure-Python fallback.

Times DTW alignment and windowed assignment over random feature sequences
and checks that both backends return bit-identical results.

Usage: python benchmarks/bench_kernels.py [--length 200] [--dim 64] [--repeats 20]
"""

import argparse
import time

import numpy as np

from skelact.kernels import available_backends
from skelact.registration import frame_distances


def time_fn(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=200)
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--radius", type=int, default=14)
    args = ap.parse_args()

    backends = available_backends()
    if "native" not in backends:
        print("compiled extension not built; only the python fallback is available")

    rng = np.random.default_rng(0)
    P = rng.random((args.length, args.dim))
    H = rng.random((args.length, args.dim))
    dist = frame_distances(P, H)

    results = {}
    for name, mod in backends.items():
        results[name] = {
            "dtw": time_fn(lambda m=mod: m.dtw_path(dist), args.repeats),
            "window": time_fn(lambda m=mod: m.window_assign(dist, args.radius, 0), args.repeats),
        }

    if len(backends) == 2:
        pi, pj, pt = backends["python"].dtw_path(dist)
        ni, nj, nt = backends["native"].dtw_path(dist)
        assert pt == nt and np.array_equal(pi, ni) and np.array_equal(pj, nj), "backend mismatch"
        pa = backends["python"].window_assign(dist, args.radius, 1)
        na = backends["native"].window_assign(dist, args.radius, 1)
        assert np.array_equal(pa, na), "backend mismatch"
        print("backends agree bit-for-bit")

    print(f"\nT={args.length} D={args.dim} (best of {args.repeats})")
    print(f"{'kernel':<10} " + " ".join(f"{name:>12}" for name in results))
    for kernel in ("dtw", "window"):
        row = " ".join(f"{results[name][kernel] * 1e3:>10.3f}ms" for name in results)
        print(f"{kernel:<10} {row}")
    if len(results) == 2:
        for kernel in ("dtw", "window"):
            speedup = results["python"][kernel] / results["native"][kernel]
            print(f"{kernel}: native is {speedup:.1f}x faster")


if __name__ == "__main__":
    main()

"""Benchmark of the two kernel backends (compiled extension vs pure python).

Usage: python benchmarks/bench_kernels.py [--sizes 5,10,21,50] [--repeat 20]
"""

import argparse
import time

import numpy as np

from pose6d import kernels
from pose6d import _pykernels


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_assignment(sizes, repeat):
    rng = np.random.default_rng(0)
    print(f"{'n':>6} {'python (ms)':>14} {'compiled (ms)':>14} {'speedup':>9}")
    for n in sizes:
        costs = np.ascontiguousarray(rng.uniform(-5, 5, (n, n)))
        t_py = _time(lambda: _pykernels.solve_assignment(costs), repeat)
        if kernels.compiled_impl is None:
            print(f"{n:>6} {t_py * 1e3:>14.3f} {'n/a':>14} {'n/a':>9}")
            continue
        t_c = _time(lambda: kernels.compiled_impl.solve_assignment(costs), repeat)
        print(f"{n:>6} {t_py * 1e3:>14.3f} {t_c * 1e3:>14.3f} {t_py / t_c:>8.1f}x")


def bench_closest_distance(sizes, repeat):
    rng = np.random.default_rng(1)
    print(f"{'K':>6} {'python (ms)':>14} {'compiled (ms)':>14} {'speedup':>9}")
    for k in sizes:
        a = np.ascontiguousarray(rng.normal(size=(k, 3)))
        b = np.ascontiguousarray(rng.normal(size=(k, 3)))
        t_py = _time(lambda: _pykernels.mean_closest_distance(a, b), repeat)
        if kernels.compiled_impl is None:
            print(f"{k:>6} {t_py * 1e3:>14.3f} {'n/a':>14} {'n/a':>9}")
            continue
        t_c = _time(lambda: kernels.compiled_impl.mean_closest_distance(a, b), repeat)
        print(f"{k:>6} {t_py * 1e3:>14.3f} {t_c * 1e3:>14.3f} {t_py / t_c:>8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="5,10,21,50",
                        help="comma-separated problem sizes")
    parser.add_argument("--repeat", type=int, default=20,
                        help="repetitions per measurement (best-of)")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active backend: {kernels.BACKEND}\n")
    print("assignment solve (n x n cost matrix)")
    bench_assignment(sizes, args.repeat)
    print("\nmean closest-point distance (K x 3 point sets)")
    bench_closest_distance([s * 10 for s in sizes], args.repeat)


if __name__ == "__main__":
    main()

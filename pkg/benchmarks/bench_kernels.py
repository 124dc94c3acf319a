"""Compiled kernels against the numpy fallback: time per lattice cell.

    python3 benchmarks/bench_kernels.py [--size 300] [--reps 64] [--repeat 3]

Both backends are run on the same inputs; outputs are compared bit for bit.
"""

import argparse
import time

import numpy as np

from lpplab import kernels
from lpplab.geometry import axes_path
from lpplab.sampling import (bulk_reverse, first_step_samples, sweep,
                             triangle_count_samples)


def cases(L, reps):
    nu = axes_path(L, L)
    yield "forward_sweep", (L + 1) ** 2, lambda impl: sweep(
        7, reps, 0.5, 0.5, [(L, L), (L // 2, L)], marks=nu, impl=impl, threads=1)
    yield "reverse_queries", L * L, lambda impl: bulk_reverse(
        7, reps, L, L, [(1, 1), (2, 1), (1, 2)], impl=impl, threads=1)
    yield "first_step", (L + 1) ** 2, lambda impl: first_step_samples(
        7, reps, L, L, [0.5, 0.55], impl=impl, threads=1)
    yield "triangle_counts", (L + 1) * (L + 2) // 2, lambda impl: triangle_count_samples(
        7, reps, L, [L // 2, L], impl=impl, threads=1)


def best_of(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.array_equal(x, y) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=300)
    ap.add_argument("--reps", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.have_compiled():
        raise SystemExit("compiled kernels not built; run pip install -e . --no-build-isolation")
    print(f"{'kernel':<16} {'compiled ns/cell':>17} {'python ns/cell':>15} {'speedup':>8}  match")
    for name, cells, fn in cases(args.size, args.reps):
        tc, oc = best_of(lambda: fn("compiled"), args.repeat)
        tp, op = best_of(lambda: fn("python"), args.repeat)
        per = 1e9 / (cells * args.reps)
        print(f"{name:<16} {tc * per:>17.2f} {tp * per:>15.2f} {tp / tc:>8.1f}  {same(oc, op)}")


if __name__ == "__main__":
    main()

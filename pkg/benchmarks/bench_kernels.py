"""Compare the numba and numpy paths of the int64 kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths must agree exactly; the script checks that before timing.
The first numba call is reported separately because it includes loading or
compiling the kernel.
"""

import argparse
import time

import numpy as np

from cogef import _kernels
from cogef.generators import gen_dual_complete
from cogef.linalg import Matrix


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_box_filter(repeat):
    inst = gen_dual_complete(5, Matrix.diag([2, 1, 1, 1, 1, 1]))
    A = np.array(inst.A.rows, dtype=np.int64)
    b = np.array(inst.b, dtype=np.int64)
    rows = []
    for radius in (2, 3, 4):
        lo = np.full(inst.n, -radius, dtype=np.int64)
        hi = np.full(inst.n, radius, dtype=np.int64)
        t0 = time.perf_counter()
        fast = _kernels.box_filter(A, b, lo, hi, use_numba=True)
        first = time.perf_counter() - t0
        slow = _kernels.box_filter(A, b, lo, hi, use_numba=False)
        assert np.array_equal(fast, slow), "box filter paths disagree"
        t_numba = _time(lambda: _kernels.box_filter(A, b, lo, hi, use_numba=True), repeat)
        t_numpy = _time(lambda: _kernels.box_filter(A, b, lo, hi, use_numba=False), repeat)
        rows.append((f"box_filter n=6 r={radius}", (2 * radius + 1) ** 6, first, t_numba, t_numpy))
    return rows


def bench_batch_det(repeat):
    rng = np.random.default_rng(7)
    rows = []
    for k, count in ((3, 20_000), (5, 50_000), (8, 20_000)):
        mats = rng.integers(-3, 4, size=(count, k, k), dtype=np.int64)
        t0 = time.perf_counter()
        fast = _kernels.batch_det(mats, use_numba=True)
        first = time.perf_counter() - t0
        slow = _kernels.batch_det(mats, use_numba=False)
        assert np.array_equal(fast, slow), "determinant paths disagree"
        t_numba = _time(lambda: _kernels.batch_det(mats, use_numba=True), repeat)
        t_numpy = _time(lambda: _kernels.batch_det(mats, use_numba=False), repeat)
        rows.append((f"batch_det k={k}", count, first, t_numba, t_numpy))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or COGEF_DISABLE_NUMBA set); only the numpy path exists")
        return
    print(f"{'kernel':<24}{'items':>10}{'numba 1st':>12}{'numba':>11}{'numpy':>11}{'speedup':>9}")
    for name, items, first, tn, tp in bench_box_filter(args.repeat) + bench_batch_det(args.repeat):
        print(f"{name:<24}{items:>10}{first:>11.4f}s{tn:>10.4f}s{tp:>10.4f}s{tp / tn:>8.1f}x")


if __name__ == "__main__":
    main()

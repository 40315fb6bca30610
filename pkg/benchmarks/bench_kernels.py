"""Compare the numba kernels with their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both paths run on the same inputs; their results are checked for equality
before timings are printed.
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from gkmquiver import _kernels
from gkmquiver.fixtures import fl_n
from gkmquiver.oracles import brute_force_fixed_points, count_points_fq


def _timed(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _with_flag(disabled: bool, fn):
    old = os.environ.get("GKMQUIVER_DISABLE_NUMBA")
    os.environ["GKMQUIVER_DISABLE_NUMBA"] = "1" if disabled else "0"
    try:
        return fn()
    finally:
        if old is None:
            del os.environ["GKMQUIVER_DISABLE_NUMBA"]
        else:
            os.environ["GKMQUIVER_DISABLE_NUMBA"] = old


def cases():
    fl4 = fl_n(4)
    rng = np.random.default_rng(0)
    n = 16
    succ = np.zeros(n, dtype=np.int64)
    for b in range(n - 1):
        if rng.random() < 0.6:
            succ[b] = 1 << (b + 1)
    fiber_of = rng.integers(0, 4, size=n)
    e = np.bincount(fiber_of, minlength=4) // 2
    yield "closed_subsets n=16", lambda: _kernels.closed_subsets(succ, fiber_of, e).tolist()
    yield "brute_force_fixed_points fl_4", lambda: len(brute_force_fixed_points(fl4.quiver, fl4.forest, fl4.e))
    yield "count_points_fq fl_4 p=3", lambda: count_points_fq(fl4.quiver, fl4.forest, fl4.e, 3).count
    sizes = [40, 130, 40]
    allowed_a = rng.random((40, 130)) < 0.3
    allowed_b = rng.random((130, 40)) < 0.3
    cons = [(1, 0, allowed_a), (2, 1, allowed_b)]
    yield "count_tuples 40x130x40", lambda: _kernels.count_tuples(sizes, cons)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; only the numpy path can run")
    print(f"{'case':32s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases():
        _with_flag(False, fn)  # compile outside the timing
        t_jit, r_jit = _with_flag(False, lambda: _timed(fn, args.repeat))
        t_np, r_np = _with_flag(True, lambda: _timed(fn, args.repeat))
        if r_jit != r_np:
            raise SystemExit(f"{name}: paths disagree ({r_jit!r} vs {r_np!r})")
        print(f"{name:32s} {t_jit * 1e3:12.2f} {t_np * 1e3:12.2f} {t_np / t_jit:8.1f}")


if __name__ == "__main__":
    main()

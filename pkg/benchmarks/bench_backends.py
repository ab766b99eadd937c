#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-python fallback.

Also asserts that both backends return identical bits on every workload,
which is the contract that makes the fallback a drop-in replacement.

Run:  python3 benchmarks/bench_backends.py
"""

from __future__ import annotations

import time

import numpy as np

from biasfuse import _kernels_py

try:
    from biasfuse import _kernels
except ImportError:
    _kernels = None


def _time(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_minsum(n: int, rng) -> tuple[str, float, float]:
    a = rng.uniform(0.05, 0.5, n)
    b = rng.uniform(0.05, 0.5, n)
    t_py, v_py = _time(_kernels_py.minsum_total, a, b, 0.6, 0.4)
    t_cy, v_cy = _time(_kernels.minsum_total, a, b, 0.6, 0.4)
    assert v_cy == v_py, f"minsum mismatch at n={n}: {v_cy!r} != {v_py!r}"
    return f"minsum n={n}", t_py, t_cy


def bench_table(n: int, rng) -> tuple[str, float, float]:
    a = rng.uniform(0.05, 0.5, n)
    b = rng.uniform(0.05, 0.5, n)
    t_py, v_py = _time(_kernels_py.map_table, a, b, 0.6, 0.4)
    t_cy, v_cy = _time(_kernels.map_table, a, b, 0.6, 0.4)
    assert np.array_equal(v_cy, v_py), f"table mismatch at n={n}"
    return f"map_table n={n}", t_py, t_cy


def bench_sim(trials: int, n: int, rng) -> tuple[str, float, float]:
    a = rng.uniform(0.05, 0.5, n)
    b = rng.uniform(0.05, 0.5, n)
    u = rng.random((trials, n + 1))
    t_py, (x_py, i_py) = _time(_kernels_py.sim_indices, u, a, b, 0.4)
    t_cy, (x_cy, i_cy) = _time(_kernels.sim_indices, u, a, b, 0.4)
    assert np.array_equal(x_cy, x_py) and np.array_equal(i_cy, i_py)
    return f"sim_indices {trials:.0e} trials n={n}", t_py, t_cy


def main() -> int:
    if _kernels is None:
        print("compiled backend not built; nothing to compare")
        return 1
    rng = np.random.default_rng(2024)
    rows = []
    for n in (12, 16, 20, 22):
        rows.append(bench_minsum(n, rng))
    for n in (16, 20):
        rows.append(bench_table(n, rng))
    rows.append(bench_sim(1_000_000, 8, rng))

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'python':>10}  {'cython':>10}  {'speedup':>8}")
    for name, t_py, t_cy in rows:
        print(f"{name:<{width}}  {t_py:>9.4f}s  {t_cy:>9.4f}s  {t_py / t_cy:>7.1f}x")
    print("\nall workloads returned identical bits on both backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

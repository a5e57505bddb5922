"""Benchmark the numba-compiled hot kernels against the numpy fallbacks.

Run directly:  python benchmarks/bench_numba.py
The same fallback paths are selected at import time by setting
CLUSTERREG_DISABLE_NUMBA=1 before running anything in the package.
"""

import time

import numpy as np

from clusterreg._accel import HAVE_NUMBA
from clusterreg.clustering import _elkan_run, _kmeans_pp
from clusterreg.kernels import (
    _manhattan_cdist_nb,
    _manhattan_cdist_np,
    _sqeuclid_cdist_nb,
    _sqeuclid_cdist_np,
)


def timeit(fn, *args, repeats=5):
    fn(*args)  # warmup / JIT compile
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(2000, 3))
    B = rng.normal(size=(1500, 3))

    print(f"numba available and enabled: {HAVE_NUMBA}")
    print(f"{'kernel':<24}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>9}")

    for name, nb, np_, args in (
        ("manhattan_cdist", _manhattan_cdist_nb, _manhattan_cdist_np, (A, B)),
        ("sqeuclid_cdist", _sqeuclid_cdist_nb, _sqeuclid_cdist_np, (A, B)),
    ):
        t_np = timeit(np_, *args)
        if HAVE_NUMBA:
            t_nb = timeit(nb, *args)
            print(f"{name:<24}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<24}{'-':>12}{t_np:>12.4f}{'-':>9}")

    X = rng.normal(size=(3000, 3))
    centers = _kmeans_pp(X, 100, np.random.default_rng(0))
    if HAVE_NUMBA:
        t_nb = timeit(_elkan_run, X, centers, 100, repeats=3)
        t_py = timeit(_elkan_run.py_func, X, centers, 100, repeats=1)
        print(f"{'elkan_kmeans':<24}{t_nb:>12.4f}{t_py:>12.4f}{t_py / t_nb:>9.1f}x")
    else:
        t_py = timeit(_elkan_run, X, centers, 100, repeats=1)
        print(f"{'elkan_kmeans':<24}{'-':>12}{t_py:>12.4f}{'-':>9}")


if __name__ == "__main__":
    main()

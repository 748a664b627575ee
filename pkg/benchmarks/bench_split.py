"""Benchmark the split-search kernel: compiled extension vs pure Python.

Usage: python3 benchmarks/bench_split.py [--rows N] [--cols M] [--repeat R]

Times (a) the raw best_split kernel on a single large node and (b) a full
train_gbdt run with each backend swapped in.
"""
import argparse
import statistics
import time

import numpy as np

from classabs import _split_py, classify
from classabs.classify import GbdtParams, SparseCols, train_gbdt

try:
    from classabs import _split_cy
except ImportError:
    _split_cy = None


def _node(rows, cols, density, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(rows, cols))
    X[rng.random(X.shape) < 1.0 - density] = 0.0
    sc = SparseCols(X)
    grad = rng.normal(size=rows)
    in_node = np.ones(rows, dtype=np.uint8)
    return X, (sc.indptr, sc.rowidx, sc.vals, in_node, rows,
               float(grad.sum()), grad, 2)


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--cols", type=int, default=400)
    ap.add_argument("--density", type=float, default=0.05)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _split_cy is None:
        print("compiled kernel not built; only the Python numbers follow")

    X, node_args = _node(args.rows, args.cols, args.density, args.seed)
    print(f"kernel: one node, {args.rows} rows x {args.cols} cols, "
          f"density {args.density}")
    results = {}
    backends = [("python", _split_py)]
    if _split_cy is not None:
        backends.append(("cython", _split_cy))
    for name, mod in backends:
        best, med = _time(lambda: mod.best_split(*node_args), args.repeat)
        results[name] = best
        print(f"  {name:<7} best {best * 1e3:8.2f} ms   "
              f"median {med * 1e3:8.2f} ms")
    if len(results) == 2:
        print(f"  speedup {results['python'] / results['cython']:.1f}x")

    rng = np.random.default_rng(args.seed)
    Xt = rng.normal(size=(600, 120))
    Xt[rng.random(Xt.shape) < 0.8] = 0.0
    Y = [frozenset({"a"}) if Xt[i, :3].sum() > 0 else frozenset({"b"})
         for i in range(Xt.shape[0])]
    params = GbdtParams(n_trees=20)
    print("train_gbdt: 600 x 120, 20 trees, 2 classes")
    saved = classify._split
    try:
        results = {}
        for name, mod in backends:
            classify._split = mod
            best, med = _time(lambda: train_gbdt(Xt, Y, params), args.repeat)
            results[name] = best
            print(f"  {name:<7} best {best * 1e3:8.2f} ms   "
                  f"median {med * 1e3:8.2f} ms")
        if len(results) == 2:
            print(f"  speedup {results['python'] / results['cython']:.1f}x")
    finally:
        classify._split = saved


if __name__ == "__main__":
    main()

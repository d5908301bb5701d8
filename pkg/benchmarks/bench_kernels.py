#!/usr/bin/env python3
"""Numba vs pure-NumPy kernels on random graphs.

Checks both backends agree, then times each kernel.  Usage:
    python benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 5]
"""
import argparse
import time

import numpy as np

from deptw import _kernels
from deptw.qbf import PrimalGraph


def random_graph(n, degree, rng):
    m = n * degree // 2
    u = rng.integers(0, n, size=m)
    v = rng.integers(0, n, size=m)
    edges = {(int(a), int(b)) for a, b in zip(u, v) if a != b}
    return PrimalGraph.from_edges(range(n), edges)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)

    # JIT warmup, not timed
    g = random_graph(8, 3, rng)
    in_d = np.ones(8, dtype=np.bool_)
    _kernels.backdegree_numba(*g.csr, in_d, 0)
    _kernels.elimination_width_numba(g.adj_matrix, np.arange(8))
    _kernels.component_labels_numba(*g.csr, ~in_d)

    print(f"{'kernel':<18} {'n':>5} {'numpy (ms)':>11} {'numba (ms)':>11} {'speedup':>8}")
    print("-" * 57)
    for n in args.sizes:
        g = random_graph(n, args.degree, rng)
        adj = g.adj_matrix
        indptr, indices = g.csr
        in_d = rng.random(n) < 0.3
        in_d[0] = True
        order = rng.permutation(n).astype(np.int64)
        blocked = rng.random(n) < 0.2
        cases = [
            (
                "backdegree",
                lambda: _kernels.backdegree_numpy(adj, in_d, 0),
                lambda: _kernels.backdegree_numba(indptr, indices, in_d, 0),
            ),
            (
                "elimination_width",
                lambda: _kernels.elimination_width_numpy(adj, order),
                lambda: _kernels.elimination_width_numba(adj, order),
            ),
            (
                "component_labels",
                lambda: _kernels.component_labels_numpy(adj, blocked).tolist(),
                lambda: _kernels.component_labels_numba(indptr, indices, blocked).tolist(),
            ),
        ]
        for name, f_np, f_nb in cases:
            t_np, r_np = best_of(f_np, args.repeat)
            t_nb, r_nb = best_of(f_nb, args.repeat)
            assert r_np == r_nb, f"{name}: backends disagree at n={n}"
            print(f"{name:<18} {n:>5} {t_np * 1e3:>11.3f} {t_nb * 1e3:>11.3f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()

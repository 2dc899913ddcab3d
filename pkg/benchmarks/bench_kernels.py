"""Compare compiled kernels against their pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 14] [--repeat 3]

Both paths run on the same G(n, 1/2) instances and must agree; the table
reports the best wall time of each and the speedup.
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from graphcontainers import generators, kernels
from graphcontainers._jit import USE_JIT, python_impl
from graphcontainers.oracles import SparsityPredicate, _degree_order


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(g):
    adj, n = g.words(), g.n
    budgets = SparsityPredicate.density_le(Fraction(1, 4)).budgets(n)
    cap = kernels.budget_caps(budgets)
    empty = np.empty(0, np.int64)
    order = _degree_order(g)
    k = n // 2
    return {
        "count_independent": (kernels.count_independent, (adj, n)),
        "sparse_subsets": (kernels.sparse_subsets, (adj, n, budgets, cap, empty)),
        "min_k_subset_edges": (kernels.min_k_subset_edges, (adj, n, k, order)),
        "first_sparse_k_subset": (kernels.first_sparse_k_subset, (adj, n, k, k // 2)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--n", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if not USE_JIT:
        print("JIT disabled via GRAPHCONTAINERS_DISABLE_JIT; both columns time the fallback")
    g = generators.gnp(args.n, Fraction(1, 2), args.seed)
    print(f"G({g.n}, 1/2) with {g.m} edges")
    print(f"{'kernel':<24}{'jit s':>12}{'python s':>12}{'speedup':>10}")
    for name, (kernel, call) in cases(g).items():
        kernel(*call)  # compile outside the timed region
        t_jit, r_jit = best_of(lambda: kernel(*call), args.repeat)
        t_py, r_py = best_of(lambda: python_impl(kernel)(*call), args.repeat)
        assert int(r_jit) == int(r_py), f"{name}: {r_jit} != {r_py}"
        print(f"{name:<24}{t_jit:>12.5f}{t_py:>12.5f}{t_py / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()

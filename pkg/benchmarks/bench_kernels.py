"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

The first numba call compiles, so each kernel is warmed up once before timing.
"""
import argparse
import time

import numpy as np

from symdyn import kernels


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def edge_case(rng, A=4, L=7):
    mod = A ** L
    states = np.unique(rng.integers(0, mod, size=mod // 2))
    trans = rng.random((A, A)) < 0.8
    forbidden = np.unique(rng.integers(0, mod * A, size=200))
    return states, states % A, trans, forbidden, A, mod


def cw_case(rng, n=3000, density=0.003):
    mask = rng.random((n, n)) < density
    mask[np.arange(n), (np.arange(n) + 1) % n] = True
    src, dst = np.nonzero(mask)
    return src, dst, rng.uniform(0.1, 2.0, src.size), n, 5000, 1e-13


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    cases = {
        "overlap-graph edges": (kernels.edges_numba, kernels.edges_numpy, edge_case(rng)),
        "Collatz-Wielandt": (kernels.cw_numba, kernels.cw_numpy, cw_case(rng)),
        "truncated cf": (kernels.cf_numba, kernels.cf_numpy, (rng.integers(1, 10, size=(200_000, 24)),)),
    }
    print(f"{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'ratio':>8}")
    for name, (fast, slow, arg) in cases.items():
        a = best_of(lambda: fast(*arg), args.repeat)
        b = best_of(lambda: slow(*arg), args.repeat)
        print(f"{name:<22}{a:>10.4f}{b:>10.4f}{b / a:>8.1f}")


if __name__ == "__main__":
    main()

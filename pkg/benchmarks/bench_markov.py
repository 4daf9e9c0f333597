"""Time the classical fast path with and without numba on large sparse chains.

    python benchmarks/bench_markov.py --sizes 10000 100000 1000000 --degree 3

Each chain is a random sparse column-stochastic matrix with a handful of
planted cycles, so there are several bottom components with nontrivial
periods. The pure-Python kernels are skipped above ``--python-max``.
"""

import argparse
import time

import numpy as np

from peripheral.markov import StochasticMatrix, bottom_scc_periods


def sparse_chain(rng, n, degree, cycles=4):
    src = np.repeat(np.arange(n), degree)
    dst = rng.integers(0, n, size=n * degree)
    vals = rng.random(n * degree) + 0.1
    # planted absorbing cycles on disjoint node sets
    nodes = rng.permutation(n)[: cycles * 7]
    planted = np.zeros(n, dtype=bool)
    for c in range(cycles):
        ring = nodes[c * 7: c * 7 + 2 + c]
        planted[ring] = True
        src = np.concatenate([src, ring])
        dst = np.concatenate([dst, np.roll(ring, -1)])
        vals = np.concatenate([vals, np.ones(len(ring))])
    keep = ~planted[src] | (vals == 1.0)
    src, dst, vals = src[keep], dst[keep], vals[keep]
    sums = np.bincount(src, weights=vals, minlength=n)
    return StochasticMatrix(n, dst, src, vals / sums[src])


def best_of(f, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = f()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--python-max", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    bottom_scc_periods(sparse_chain(rng, 50, 2), use_numba=True)  # compile outside the timings
    print(f"{'n':>10} {'edges':>10} {'numba s':>10} {'python s':>10} {'speedup':>8}  periods")
    for n in args.sizes:
        m = sparse_chain(rng, n, args.degree)
        t_nb, res = best_of(lambda: bottom_scc_periods(m, use_numba=True), args.repeat)
        if n <= args.python_max:
            t_py, res_py = best_of(lambda: bottom_scc_periods(m, use_numba=False), 1)
            assert res_py == res
            py, speed = f"{t_py:10.3f}", f"{t_py / t_nb:8.1f}"
        else:
            py, speed = f"{'skipped':>10}", f"{'':>8}"
        print(f"{n:>10} {m.rows.size:>10} {t_nb:10.3f} {py} {speed}  {sorted(res.periods)}")


if __name__ == "__main__":
    main()

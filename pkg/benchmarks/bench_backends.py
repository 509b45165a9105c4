"""Compare the numba kernels with their numpy/python fallbacks.

    python benchmarks/bench_backends.py --repeat 5
"""
import argparse
import time

import numpy as np

from seedmatch import CorrelatedPairSpec, PointMass, sample_correlated_pair, sgm_match
from seedmatch import _accel, matchers
from seedmatch.assignment import lap_with_duals
from seedmatch.graph import _xor_popcount_numba


def best_of(fn, repeat):
    fn()  # warm-up (JIT compile, caches)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_lap(n, repeat, rng):
    cost = rng.random((n, n))
    return {b: best_of(lambda: lap_with_duals(cost, b), repeat) for b in ("numba", "numpy")}


def bench_popcount(n, repeat, rng):
    pair = sample_correlated_pair(CorrelatedPairSpec(n, 0, 0.5, PointMass(0.5)), rng)
    a, b = pair.g1.packed, pair.g2.packed
    return {
        "numba": best_of(lambda: _xor_popcount_numba(a, b), repeat),
        "numpy": best_of(lambda: np.bitwise_count(a ^ b).sum(), repeat),
    }


def bench_sgm(n, repeat, rng):
    pair = sample_correlated_pair(CorrelatedPairSpec(n, 10, 0.3, PointMass(0.5)), rng)
    return {
        b: best_of(lambda: sgm_match(pair.g1, pair.g2, pair.partition, backend=b), repeat)
        for b in ("numba", "numpy")
    }


def bench_exact(n, repeat, rng):
    pair = sample_correlated_pair(CorrelatedPairSpec(n, n, 0.0, PointMass(0.5)), rng)
    out = {}
    for name, flag in (("numba", True), ("numpy", False)):
        _accel.USE_NUMBA = flag
        out[name] = best_of(lambda: matchers.exact_match(pair.g1, pair.g2, pair.partition, limit=n), repeat)
    _accel.USE_NUMBA = _accel.HAVE_NUMBA
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--exact-n", type=int, default=10, help="nonseeds for the branch-and-bound case")
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)

    cases = [
        ("lap n=100", lambda: bench_lap(100, args.repeat, rng)),
        ("lap n=500", lambda: bench_lap(500, args.repeat, rng)),
        ("xor-popcount n=2000", lambda: bench_popcount(2000, args.repeat, rng)),
        ("sgm n=300", lambda: bench_sgm(300, args.repeat, rng)),
        (f"exact n={args.exact_n}", lambda: bench_exact(args.exact_n, args.repeat, rng)),
    ]
    print(f"{'case':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, run in cases:
        t = run()
        print(f"{name:<22}{t['numba']:>12.4f}{t['numpy']:>12.4f}{t['numpy'] / t['numba']:>9.1f}x")


if __name__ == "__main__":
    main()

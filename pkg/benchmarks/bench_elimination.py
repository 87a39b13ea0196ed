"""Compare the compiled and pure elimination kernels on workloads shaped
like the library's real call sites:

  dense NxN      mid-size Bareiss elimination; entry growth makes bigint
                 arithmetic the bottleneck, so the compiled gain is modest
  dense batch    many small systems, the shape of per-pair solves; loop
                 overhead dominates and the compiled kernel wins
  banded sparse  graded constraint systems (derivations, cocycle spaces)
                 keep a few small entries near the diagonal

Random dense-fill sparse matrices are deliberately absent: fill-in turns
them into bigint-gcd stress tests that neither backend is built for and
that the library never produces.

Run:  python3 benchmarks/bench_elimination.py [--repeat N]
"""

import argparse
import random
import time

from lieforge import _ffelim_py

try:
    from lieforge import _ffelim as _compiled
except ImportError:
    _compiled = None


def dense_case(rng, n, m, bound=20):
    return [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(n)]


def banded_case(rng, n, m, band=8, per_row=4, bound=6):
    rows = []
    for i in range(n):
        base = int(i * m / n)
        row = {}
        for _ in range(per_row):
            c = min(m - 1, max(0, base + rng.randint(-band, band)))
            row[c] = rng.randint(-bound, bound)
        rows.append({c: v for c, v in row.items() if v})
    return rows


def small_batch(rng, count=2000):
    mats = []
    for _ in range(count):
        n = rng.randint(3, 10)
        m = rng.randint(3, 10)
        mats.append(([[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)], m))
    return mats


def best_of(fn, rebuild, repeat):
    times = []
    for _ in range(repeat):
        arg = rebuild()
        t0 = time.perf_counter()
        fn(arg)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if _compiled is None:
        print("compiled kernel not built; run pip install -e . first")
        return

    def run_dense(mod, n, m):
        data = dense_case(random.Random(1234), n, m)
        return best_of(
            lambda a: mod.ff_forward_dense(a[0], a[1]),
            lambda: ([r[:] for r in data], m),
            args.repeat,
        )

    def run_banded(mod, n, m):
        data = banded_case(random.Random(1234), n, m)
        return best_of(
            lambda a: mod.ff_forward_sparse(a[0], a[1]),
            lambda: ([dict(r) for r in data], m),
            args.repeat,
        )

    def run_batch(mod):
        mats = small_batch(random.Random(7))
        def go(ms):
            for d, m in ms:
                mod.ff_forward_dense(d, m)
        return best_of(
            go, lambda: [([r[:] for r in d], m) for d, m in mats], args.repeat
        )

    cases = [
        ("dense 40x40", lambda mod: run_dense(mod, 40, 40)),
        ("dense 60x60", lambda mod: run_dense(mod, 60, 60)),
        ("dense batch 2000", run_batch),
        ("banded 1000x600", lambda mod: run_banded(mod, 1000, 600)),
        ("banded 3000x1500", lambda mod: run_banded(mod, 3000, 1500)),
    ]
    print(f"{'case':<20}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}")
    for label, runner in cases:
        tp = runner(_ffelim_py)
        tc = runner(_compiled)
        print(f"{label:<20}{tp * 1e3:>12.2f}{tc * 1e3:>15.2f}{tp / tc:>9.2f}x")


if __name__ == "__main__":
    main()

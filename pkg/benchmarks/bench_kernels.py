"""Benchmark the compiled bucketing kernel against the numpy fallback.

Run from a checkout with the package installed:

    python3 benchmarks/bench_kernels.py --sizes 1e4,1e5,1e6 --repeats 7

The compiled path is exercised only when numba imported successfully and
QUANTDIST_NUMBA did not disable it; otherwise the script reports the
fallback alone. Both paths produce bitwise-identical bucket ids, so this
is purely a throughput comparison.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from quantdist import kernels


def _sizes(raw: str) -> list[int]:
    return [int(float(part)) for part in raw.split(",")]


def bench(fn, values: np.ndarray, repeats: int) -> float:
    fn(values[:16])  # warm up (triggers JIT compilation on the numba path)
    timer = timeit.Timer(lambda: fn(values))
    return min(timer.repeat(repeat=repeats, number=1))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=_sizes, default=[10_000, 100_000, 1_000_000])
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"numba active: {kernels.USE_NUMBA}")
    header = f"{'n':>10}  {'numpy (ms)':>12}  {'numba (ms)':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        values = 10.0 ** rng.uniform(-14.0, 14.0, size=n)
        values[rng.random(n) < 0.05] = 0.0
        values[rng.random(n) < 0.5] *= -1.0
        t_numpy = bench(kernels._bucket_indices_numpy, values, args.repeats)
        if kernels.USE_NUMBA:
            t_numba = bench(kernels._bucket_indices_numba, values, args.repeats)
            assert np.array_equal(
                kernels._bucket_indices_numba(values),
                kernels._bucket_indices_numpy(values),
            )
            print(
                f"{n:>10}  {1e3 * t_numpy:>12.3f}  {1e3 * t_numba:>12.3f}"
                f"  {t_numpy / t_numba:>7.2f}x"
            )
        else:
            print(f"{n:>10}  {1e3 * t_numpy:>12.3f}  {'n/a':>12}  {'n/a':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

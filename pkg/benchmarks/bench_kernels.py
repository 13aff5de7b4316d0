"""Compare the compiled kernel backend against the pure-numpy fallback.

Times every kernel on identical inputs, reports the per-call median and
the speedup, and cross-checks that both backends agree numerically. Run
from the repository root after an editable install:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --points 20000 --repeats 9
"""

import argparse
import sys
import time

import numpy as np

from sdmafit.kernels import _ref

try:
    from sdmafit.kernels import _fast
except ImportError:
    _fast = None


def median_seconds(fn, args, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    times.sort()
    return times[len(times) // 2]


def max_diff(got, want) -> float:
    if isinstance(got, tuple):
        return max(max_diff(g, w) for g, w in zip(got, want))
    return float(np.max(np.abs(np.asarray(got, dtype=float)
                               - np.asarray(want, dtype=float))))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="kernel backend micro-benchmarks")
    parser.add_argument("--points", type=int, default=5000,
                        help="sample rows (default 5000)")
    parser.add_argument("--dims", type=int, default=4,
                        help="input dimensions (default 4)")
    parser.add_argument("--k", type=int, default=8,
                        help="convex-block planes (default 8)")
    parser.add_argument("--m", type=int, default=6,
                        help="concave-block planes (default 6)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, median reported (default 5)")
    args = parser.parse_args(argv)

    if _fast is None:
        print("compiled backend is not importable; build it with "
              "`pip install -e .` and retry")
        return 1

    rng = np.random.default_rng(0)
    b = rng.normal(0, 1, args.k)
    a = rng.normal(0, 1, (args.k, args.dims))
    h = rng.normal(0, 1, args.m)
    g = rng.normal(0, 1, (args.m, args.dims))
    X = rng.normal(0, 2, (args.points, args.dims))
    la, lb = 0.7, 1.1

    cases = [
        ("ma_values", (b, a, X)),
        ("ma_values_argmax", (b, a, X)),
        ("sma_values", (b, a, la, X)),
        ("ma_value_jacobian", (b, a, X)),
        ("sma_value_jacobian", (b, a, la, X)),
        ("dma_value_jacobian", (b, a, h, g, X)),
        ("sdma_value_jacobian", (b, a, la, h, g, lb, X)),
    ]

    print(f"points={args.points} dims={args.dims} k={args.k} m={args.m} "
          f"repeats={args.repeats}")
    print(f"{'kernel':<22} {'python':>10} {'compiled':>10} "
          f"{'speedup':>8} {'max diff':>10}")
    worst = 0.0
    for name, call_args in cases:
        ref_fn = getattr(_ref, name)
        fast_fn = getattr(_fast, name)
        diff = max_diff(fast_fn(*call_args), ref_fn(*call_args))
        worst = max(worst, diff)
        t_ref = median_seconds(ref_fn, call_args, args.repeats)
        t_fast = median_seconds(fast_fn, call_args, args.repeats)
        print(f"{name:<22} {t_ref * 1e3:>8.2f}ms {t_fast * 1e3:>8.2f}ms "
              f"{t_ref / t_fast:>7.1f}x {diff:>10.2e}")
    print(f"largest cross-backend difference: {worst:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

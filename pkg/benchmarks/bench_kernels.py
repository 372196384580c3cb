#!/usr/bin/env python3
"""Benchmark: compiled kernel extension vs the pure-Python twin.

Run from the repository root after building the extension:

    python benchmarks/bench_kernels.py
"""

import timeit

from a4l_analytics.stats import _pure

try:
    from a4l_analytics.stats import _ckernels
except ImportError:
    _ckernels = None

CASES = [
    ("betainc(2.5, 3.5, 0.3)", lambda m: m.betainc(2.5, 3.5, 0.3)),
    ("betainc(500, 700, 0.42)", lambda m: m.betainc(500.0, 700.0, 0.42)),
    ("student_t_cdf(1.5, 38)", lambda m: m.student_t_cdf(1.5, 38.0)),
    ("noncentral_t_cdf(2.0, 38, 2.53)", lambda m: m.noncentral_t_cdf(2.0, 38.0, 2.53)),
    ("noncentral_t_cdf(30, 120, 32)", lambda m: m.noncentral_t_cdf(30.0, 120.0, 32.0)),
    ("normal_cdf(1.96)", lambda m: m.normal_cdf(1.96)),
    ("mwu_exact_counts(6, 6)", lambda m: m.mwu_exact_counts(6, 6)),
]


def time_call(fn, repeats=5, number=2000):
    best = min(timeit.repeat(fn, repeat=repeats, number=number))
    return best / number


def main():
    if _ckernels is None:
        print("compiled backend not available; build it with:")
        print("    python setup.py build_ext --inplace")
        return

    width = max(len(name) for name, _ in CASES)
    print(f"{'kernel':<{width}}  {'pure us':>9}  {'compiled us':>11}  {'speedup':>7}")
    for name, call in CASES:
        t_pure = time_call(lambda: call(_pure)) * 1e6
        t_comp = time_call(lambda: call(_ckernels)) * 1e6
        print(f"{name:<{width}}  {t_pure:>9.2f}  {t_comp:>11.2f}  {t_pure / t_comp:>6.1f}x")


if __name__ == "__main__":
    main()

"""Benchmark the compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py

The workloads mirror the solver's hot path: per-observation category
probabilities, derivatives, and the fused log-likelihood/gradient kernel,
at observation counts bracketing the rating-protocol scale.
"""

import time

import numpy as np

from catmc._kernels import _fallback

try:
    from catmc._kernels import _core
except ImportError:
    _core = None


def bench(fn, *args, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'n':>9}{'K':>4}{'numpy (ms)':>12}{'cython (ms)':>13}{'speedup':>9}")
    for n in (10_000, 90_000, 1_000_000):
        for K in (2, 5):
            alphas = np.ascontiguousarray(rng.normal(size=K))
            betas = np.ascontiguousarray(rng.normal(size=K))
            x = np.ascontiguousarray(rng.uniform(-2, 2, size=n))
            cats = np.ascontiguousarray(rng.integers(0, K, size=n), dtype=np.intp)
            cases = [
                ("logit_probs", (alphas, betas, x)),
                ("logit_derivs", (alphas, betas, x)),
                ("obs_loglik", (alphas, betas, x, cats, 1e-12)),
                ("obs_loglik_grad", (alphas, betas, x, cats, 1e-12)),
            ]
            for name, args in cases:
                t_py = bench(getattr(_fallback, name), *args)
                if _core is None:
                    print(f"{name:<18}{n:>9}{K:>4}{1e3 * t_py:>12.3f}{'n/a':>13}{'':>9}")
                    continue
                t_cy = bench(getattr(_core, name), *args)
                print(
                    f"{name:<18}{n:>9}{K:>4}{1e3 * t_py:>12.3f}"
                    f"{1e3 * t_cy:>13.3f}{t_py / t_cy:>9.2f}"
                )
    if _core is None:
        print("\ncompiled extension unavailable; only the fallback was timed")


if __name__ == "__main__":
    main()

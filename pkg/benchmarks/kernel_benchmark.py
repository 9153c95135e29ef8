#!/usr/bin/env python3
"""Compare the compiled and pure kernel backends.

Times the three accumulator kernels and an end-to-end landscape
evaluation over a range of batch sizes and dimensionalities, and verifies
that both backends return bit-identical results while at it.

Usage: python benchmarks/kernel_benchmark.py [--repeats N]
"""
import argparse
import time

import numpy as np

from simadv._kernels import pure

try:
    from simadv._kernels import _core
except ImportError:
    _core = None

from simadv import BuiltinSut, from_params


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_kernel_table(repeats):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<14} {'batch':>8} {'dims':>5} {'pure':>12} "
          f"{'compiled':>12} {'speedup':>8}")
    for m in (8, 1_000, 100_000):
        for n in (2, 16, 62):
            pts = np.ascontiguousarray(rng.uniform(-2, 2, size=(m, n)))
            center = np.ascontiguousarray(rng.uniform(-1, 1, size=n))
            half = np.ascontiguousarray(rng.uniform(0.5, 2.0, size=n))
            for name, args in (("sq_dist", (pts, center)),
                               ("dot", (pts, center)),
                               ("scaled_absmax", (pts, half))):
                t_pure = best_of(repeats, getattr(pure, name), *args)
                if _core is None:
                    print(f"{name:<14} {m:>8} {n:>5} {t_pure * 1e6:>10.1f}us"
                          f" {'n/a':>12} {'n/a':>8}")
                    continue
                t_core = best_of(repeats, getattr(_core, name), *args)
                assert np.array_equal(getattr(pure, name)(*args),
                                      getattr(_core, name)(*args)), \
                    f"{name}: backends disagree"
                print(f"{name:<14} {m:>8} {n:>5} {t_pure * 1e6:>10.1f}us"
                      f" {t_core * 1e6:>10.1f}us {t_pure / t_core:>7.1f}x")


def run_end_to_end(repeats):
    """Full landscape evaluation (accumulator + exp formula layer)."""
    import simadv._kernels as kernels

    land = from_params("multi_basin", {"basins": [
        {"amplitude": 1.0, "center": [0.1] * 16, "scale": 0.8},
        {"amplitude": 0.9, "center": [-0.3] * 16, "scale": 1.2},
    ]}, dims=16)
    sut = BuiltinSut(land)
    pts = np.random.default_rng(1).uniform(-2, 2, size=(200_000, 16))
    print(f"\nend-to-end multi_basin eval, batch 200k x 16 dims "
          f"(active backend: {kernels.BACKEND})")
    t = best_of(repeats, sut.loss_batch, pts)
    print(f"  {t * 1e3:.1f} ms  ({200_000 / t / 1e6:.1f} M evals/s)")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if _core is None:
        print("compiled backend not built; timing the pure backend only\n")
    run_kernel_table(args.repeats)
    run_end_to_end(args.repeats)


if __name__ == "__main__":
    main()

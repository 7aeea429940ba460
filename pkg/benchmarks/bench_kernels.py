"""Timing comparison of the compiled kernel core against the numpy fallback.

Usage: ``python3 benchmarks/bench_kernels.py [--sizes 512,1024,2048,4096]``

Times the two hot primitives (pairwise squared distances and the fused
Gaussian-mixture kernel) on tube-like point clouds of increasing size
and prints one row per size with the speedup of the compiled path.
Exits with a note instead of failing when the extension is not built.
"""

import argparse
import time

import numpy as np

from shellbound import kernels


def tube_cloud(rng, count, dim=2):
    # points scattered around the unit shell, like the variational tube
    raw = rng.standard_normal((count, dim))
    shell = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    return shell + 0.05 * rng.standard_normal((count, dim))


def best_of(runs, fn):
    best = np.inf
    for _ in range(runs):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="512,1024,2048,4096",
                        help="comma-separated cloud sizes")
    parser.add_argument("--runs", type=int, default=5, help="repeats per timing")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not kernels.HAVE_EXTENSION:
        print("compiled extension not available; nothing to compare")
        return

    rng = np.random.default_rng(0)
    amplitudes = np.array([-1.0, 0.5])
    rates = np.array([0.5, 2.0])
    print(f"{'size':>6} {'primitive':>18} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for size in sizes:
        cloud = tube_cloud(rng, size)
        fast = kernels.squared_distances(cloud, cloud, use_extension=True)
        slow = kernels.squared_distances(cloud, cloud, use_extension=False)
        assert np.abs(fast - slow).max() < 1e-12, "paths disagree"
        for label, fn in (
            ("squared_distances",
             lambda use: kernels.squared_distances(cloud, cloud, use_extension=use)),
            ("gaussian_mix",
             lambda use: kernels.gaussian_mix(cloud, cloud, amplitudes, rates,
                                              use_extension=use)),
        ):
            numpy_time = best_of(args.runs, lambda: fn(False))
            compiled_time = best_of(args.runs, lambda: fn(True))
            print(f"{size:>6} {label:>18} {numpy_time * 1e3:>8.2f}ms "
                  f"{compiled_time * 1e3:>8.2f}ms {numpy_time / compiled_time:>7.2f}x")


if __name__ == "__main__":
    main()

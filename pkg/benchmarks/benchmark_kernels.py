#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Usage:  python benchmarks/benchmark_kernels.py [--size 256] [--repeats 20]

The same kernels are selected at import time by CHUQ_BACKEND; this script
loads both tables explicitly so one process can compare them.
"""

import argparse
import time

import numpy as np

from chuq import kernels
from chuq.gpc import HermiteGaussian, moment_tensors


def timeit(fn, args, repeats):
    fn(*args)  # warm up (JIT compile / cache touch)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(size, order):
    rng = np.random.default_rng(0)
    u = rng.uniform(-0.2, 1.2, (size, size))
    v = rng.standard_normal((size, size))
    phases = rng.uniform(0.0, 1.0, (6, size, size))
    modes = rng.uniform(-1.0, 1.0, (order + 1, size, size))
    t = moment_tensors(HermiteGaussian(sigma=1.0, max_degree=order), order)
    return [
        ("double_well", (u,)),
        ("double_well_prime", (u,)),
        ("linearized_prime", (u, v)),
        ("mean_shifted_prime", (phases,)),
        ("mode_potential", (modes, np.asarray(t.e3), np.asarray(t.e4),
                            np.asarray(t.gamma))),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=256, help="grid edge length")
    parser.add_argument("--order", type=int, default=3, help="expansion order")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    numpy_table = kernels.get_backend("numpy")
    try:
        numba_table = kernels.get_backend("numba")
    except ImportError:
        numba_table = None
        print("numba not importable; timing the numpy path only\n")

    cases = make_cases(args.size, args.order)
    print(f"grid {args.size}x{args.size}, order {args.order}, "
          f"best of {args.repeats} runs\n")
    header = f"{'kernel':<20} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call_args in cases:
        t_np = timeit(numpy_table[name], call_args, args.repeats)
        if numba_table is None:
            print(f"{name:<20} {t_np * 1e3:>12.3f} {'-':>12} {'-':>9}")
            continue
        t_nb = timeit(numba_table[name], call_args, args.repeats)
        out_np = numpy_table[name](*call_args)
        out_nb = numba_table[name](*call_args)
        assert np.allclose(out_np, out_nb, rtol=1e-12, atol=1e-12), name
        print(f"{name:<20} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} "
              f"{t_np / t_nb:>8.2f}x")
    print("\nactive backend for library calls: "
          f"{kernels.BACKEND} (override with CHUQ_BACKEND)")


if __name__ == "__main__":
    main()

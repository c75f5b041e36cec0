"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on representative sizes under both backends and
prints a timing table. Invoke directly:

    python benchmarks/bench_kernels.py [--repeats 20]
"""

import argparse
import time

import numpy as np

from dcs import _kernels_np as knp
from dcs.numerics import RngStream

try:
    from dcs import _kernels_nb as knb
except ImportError:
    knb = None


def timeit(fn, args, repeats):
    fn(*args)  # warmup (also triggers JIT compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    gen = RngStream(0, 999).generator
    out = []

    n = 100_000
    kappa = gen.standard_normal(n)
    nu = gen.gamma(127.5, 2.0, size=n)
    out.append(("k_weight_summands(n=1e5)", "k_weight_summands", (0.8, kappa, nu, 256)))

    h, w = 128, 128
    x = gen.uniform(0, 1, h * w)
    bits = (gen.random(h * w) < 0.1).astype(np.uint8)
    u = gen.random(int(bits.sum()))
    out.append((f"grid_neighbor_replace({h}x{w}, rho=0.1)", "grid_neighbor_replace",
                (x, bits, u, h, w, 1)))

    t = 65_536
    xs = gen.uniform(-1, 1, t)
    bits_s = (gen.random(t) < 0.3).astype(np.uint8)
    us = gen.random(int(bits_s.sum()))
    out.append((f"window_neighbor_replace(T={t}, rho=0.3)", "window_neighbor_replace",
                (xs, bits_s, us, 2)))

    eps = gen.standard_normal((4096, 512))
    out.append(("radial_ratios(4096x512)", "radial_ratios", (eps, 1.3)))
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    print(f"{'kernel':45s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}")
    for label, name, call_args in cases():
        t_np = timeit(getattr(knp, name), call_args, args.repeats)
        if knb is None:
            print(f"{label:45s} {t_np * 1e6:10.1f}us {'n/a':>12s} {'n/a':>9s}")
            continue
        t_nb = timeit(getattr(knb, name), call_args, args.repeats)
        print(
            f"{label:45s} {t_np * 1e6:10.1f}us {t_nb * 1e6:10.1f}us "
            f"{t_np / t_nb:8.2f}x"
        )


if __name__ == "__main__":
    main()

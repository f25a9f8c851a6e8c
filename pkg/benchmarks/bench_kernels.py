"""Compare the numba and numpy backends of the lap and raster kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--size 96]

The first numba call includes JIT compilation; it is reported separately.
"""
import argparse
import time

import numpy as np

from cubicmaps._accel import HAVE_NUMBA
from cubicmaps.core import MonicForm
from cubicmaps.entropy import entropy_estimate, entropy_grid
from cubicmaps.raster import RasterConfig, classify_grid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=96, help="raster side in pixels")
    args = ap.parse_args()

    maps = [MonicForm(1, A, b) for A, b in np.random.default_rng(0).uniform([-0.5, 0], [1.2, 1], (20, 2))]
    cases = {
        "laps (20 maps, k<=60)": lambda nb: [entropy_estimate(m, kmax=60, cap=200_000, use_numba=nb)
                                             for m in maps],
        "entropy grid 16x16": lambda nb: entropy_grid((0.57, 1.03, -0.03, 0.43), 16, 16, sigma=1,
                                                      kmax=40, use_numba=nb),
        f"raster cubic-AB {args.size}^2": lambda nb: classify_grid(
            RasterConfig("cubic-AB", (-1.2, 1.2, -1.85, 0.75), args.size, args.size), use_numba=nb),
        f"raster mandelbrot {args.size}^2": lambda nb: classify_grid(
            RasterConfig("mandelbrot", (-2.25, 0.75, -1.5, 1.5), args.size, args.size), use_numba=nb),
    }
    print(f"{'kernel':34s} {'numpy s':>9s} {'numba s':>9s} {'jit s':>8s} {'speedup':>8s}")
    for name, fn in cases.items():
        t_np = best_of(lambda: fn(False), args.repeat)
        if HAVE_NUMBA:
            t0 = time.perf_counter()
            fn(True)
            jit = time.perf_counter() - t0
            t_nb = best_of(lambda: fn(True), args.repeat)
            print(f"{name:34s} {t_np:9.3f} {t_nb:9.3f} {jit:8.2f} {t_np / t_nb:7.1f}x")
        else:
            print(f"{name:34s} {t_np:9.3f} {'n/a':>9s}")


if __name__ == "__main__":
    main()

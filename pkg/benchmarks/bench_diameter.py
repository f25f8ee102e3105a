#!/usr/bin/env python3
"""Timing comparison of the pairwise-distance kernels.

Runs the compiled kernel and the vectorised numpy kernel on identical point
clouds, plus the full pruned-diameter pipeline with whichever backend is
active in this process (set DIAMLAB_BACKEND before launching to switch it).
"""

import argparse
import time

import numpy as np

from diamlab import _kernels
from diamlab.geom import PointCloud, diameter_pruned
from diamlab.sampler import RngHandle, UniformBall, sample_binomial_process


def _best_of(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def _fmt_ms(seconds: float) -> str:
    return f"{seconds * 1e3:10.3f} ms"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sizes", type=int, nargs="+", default=[500, 1000, 2000, 4000],
        help="point counts to benchmark (kernels are O(n^2))",
    )
    parser.add_argument("--d", type=int, default=2, help="ambient dimension")
    parser.add_argument("--repeats", type=int, default=5, help="best-of repeats")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--pipeline-n", type=int, default=200_000,
        help="cloud size for the end-to-end pruned-diameter row",
    )
    args = parser.parse_args()

    spec = UniformBall(args.d)
    have_numba = _kernels.NUMBA_AVAILABLE

    print(f"active backend: {_kernels.BACKEND}")
    print(f"kernel comparison, d={args.d}, best of {args.repeats}")
    header = f"{'n':>8}  {'numpy':>13}  {'numba':>13}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for size in args.sizes:
        rng = RngHandle(args.seed)
        pts = sample_binomial_process(spec, size, rng).coords
        t_np = _best_of(_kernels.max_sq_dist_numpy, (pts,), args.repeats)
        if have_numba:
            _kernels.max_sq_dist_numba(pts[:8])  # trigger JIT outside timing
            t_nb = _best_of(_kernels.max_sq_dist_numba, (pts,), args.repeats)
            ratio = f"{t_np / t_nb:7.1f}x"
            print(f"{size:>8}  {_fmt_ms(t_np)}  {_fmt_ms(t_nb)}  {ratio}")
        else:
            print(f"{size:>8}  {_fmt_ms(t_np)}  {'-':>13}  {'-':>8}")

    rng = RngHandle(args.seed + 1)
    cloud = sample_binomial_process(spec, args.pipeline_n, rng)
    # include one untimed call so JIT cost never lands in the measurement
    diameter_pruned(PointCloud(cloud.coords[:64]))
    t_pipe = _best_of(diameter_pruned, (cloud,), args.repeats)
    print()
    print(
        f"pruned diameter, n={args.pipeline_n}, d={args.d}, "
        f"backend={_kernels.BACKEND}: {_fmt_ms(t_pipe).strip()}"
    )


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernel against its pure-numpy twin.

Usage:
    python benchmarks/bench_backends.py [--pairs N ...] [--repeats K]

Runs the pair-simulation kernel on the bundled parameter set at several
population sizes, checks that both backends return bit-identical arrays,
and reports median wall time plus speedup. The first numba call compiles;
a warmup run keeps that out of the timings.
"""

import argparse
import statistics
import time

import numpy as np

from stigmagame import ModelParams, uniform
from stigmagame.coordination import period1_outcome
from stigmagame.distributions import knot_arrays
from stigmagame.signaling import continuation_values, stigma_level
from stigmagame import _kernels


def kernel_args(params: ModelParams, n_pairs: int, seed: int):
    s = stigma_level(params)
    _, _, gap = continuation_values(params, s)
    beta_star = period1_outcome(params, gap).beta_star
    beta_xs, beta_ps = knot_arrays(params.dist_beta)
    y_xs, y_ps = knot_arrays(params.dist_y)
    return (
        seed,
        n_pairs,
        beta_star,
        s,
        params.tau_hat * params.theta_H * params.z,
        params.theta_L,
        params.theta_H,
        params.v,
        params.c,
        params.c_h,
        params.M,
        params.u,
        beta_xs,
        beta_ps,
        y_xs,
        y_ps,
        False,
    )


def time_backend(backend: str, args, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        _kernels.simulate_pairs(backend, *args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--pairs",
        type=int,
        nargs="+",
        default=[10_000, 100_000, 1_000_000],
        help="population sizes to benchmark",
    )
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--seed", type=int, default=20240810)
    opts = parser.parse_args()

    params = ModelParams(
        theta_L=0.2,
        theta_H=0.8,
        v=1.0,
        c=0.55,
        c_h=1.0,
        z=2.5,
        u=0.1,
        dist_beta=uniform(0.0, 1.0),
        dist_y=uniform(0.0, 2.0),
        tau_hat=0.5,
    )
    if not _kernels.HAVE_NUMBA:
        print("numba not importable; nothing to compare")
        return

    # compile outside the timed region
    _kernels.simulate_pairs("numba", *kernel_args(params, 1_000, opts.seed))

    print(f"{'pairs':>10} {'numpy':>12} {'numba':>12} {'speedup':>9}  identical")
    for n in opts.pairs:
        args = kernel_args(params, n, opts.seed)
        out_np = _kernels.simulate_pairs("numpy", *args)
        out_nb = _kernels.simulate_pairs("numba", *args)
        identical = all(
            np.array_equal(a, b, equal_nan=True) for a, b in zip(out_np, out_nb)
        )
        t_np = time_backend("numpy", args, opts.repeats)
        t_nb = time_backend("numba", args, opts.repeats)
        print(
            f"{n:>10,} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms "
            f"{t_np / t_nb:>8.2f}x  {identical}"
        )


if __name__ == "__main__":
    main()

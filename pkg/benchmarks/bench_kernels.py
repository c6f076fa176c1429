#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Run directly::

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

The same comparison applies to a full package run: set HYPTET_NO_NUMBA=1
to force the numpy path everywhere.
"""

import argparse
import time

import numpy as np

from hyptet import _kernels


def best_of(fn, args, repeat):
    fn(*args)  # warm-up (JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if "numba" not in _kernels.BACKENDS:
        raise SystemExit("numba backend unavailable; nothing to compare")

    rng = np.random.default_rng(0)
    theta = rng.uniform(-10, 10, args.n)
    lengths = rng.uniform(-3, 3, (args.n, 6))
    angles = _kernels.BACKENDS["numpy"]["extended_angles_batch"](lengths)
    # gradient/volume kernels get interior rows only (their log-derivative
    # terms diverge on the degenerate patterns)
    keep = np.all((angles > 1e-6) & (angles < np.pi - 1e-6), axis=1)
    angles = np.ascontiguousarray(angles[keep])

    cases = (
        ("lobachevsky_batch", (theta,)),
        ("phi_batch", (lengths,)),
        ("theta_batch", (lengths,)),
        ("extended_angles_batch", (lengths,)),
        ("volume2_batch", (angles,)),
        ("volume_gradient_batch", (angles,)),
        ("covolume_batch", (lengths,)),
    )

    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<24} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for name, call_args in cases:
        t_np = best_of(_kernels.BACKENDS["numpy"][name], call_args, args.repeat)
        t_nb = best_of(_kernels.BACKENDS["numba"][name], call_args, args.repeat)
        print(f"{name:<24} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>8.2f}x")


if __name__ == "__main__":
    main()

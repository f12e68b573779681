#!/usr/bin/env python3
"""Time the hot kernels on both backends and print the speedups.

Usage: python benchmarks/bench_backends.py [--quick]

The numba backend JIT-compiles the loop kernels; the numpy backend runs the
vectorized fallbacks (whose stochastic paths still walk the random stream in
plain Python, which is where most of the gap comes from).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from srkit import kernels
from srkit.prng import Jkiss32


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _workloads(quick: bool):
    draws = 200_000 if quick else 2_000_000
    iters = 200_000 if quick else 2_000_000
    n_max = 8 if quick else 10
    patterns = 32 if quick else 256

    def prng(backend):
        kernels.jkiss32_block(kernels.state_array(Jkiss32(1).state), draws,
                              backend=backend)

    def harmonic_sr(backend):
        kernels.harmonic_run(32, 17, kernels.MODE_SR_ADD,
                             kernels.state_array(Jkiss32(1).state), iters,
                             np.array([], dtype=np.int64),
                             -(1 << 31), (1 << 31) - 1, backend=backend)

    def harmonic_rn(backend):
        kernels.harmonic_run(32, 17, kernels.MODE_RN,
                             kernels.state_array(Jkiss32(1).state), iters,
                             np.array([], dtype=np.int64),
                             -(1 << 31), (1 << 31) - 1, backend=backend)

    def unbias(backend):
        kernels.sr_sum_scan(n_max, -(1 << 15), 1 << 15, 0, backend=backend)

    def bf16(backend):
        rng = np.random.default_rng(5)
        mags = rng.integers(0, 0x7F7FFFFF, size=patterns, dtype=np.uint64)
        kernels.bf16_roundup_counts(mags, backend=backend)

    return [
        (f"jkiss32_block ({draws:,} draws)", prng),
        (f"harmonic sr ({iters:,} iterations)", harmonic_sr),
        (f"harmonic rn ({iters:,} iterations)", harmonic_rn),
        (f"sr_sum_scan (n<={n_max}, all 16-bit x)", unbias),
        (f"bf16_roundup_counts ({patterns} patterns)", bf16),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "numba" in backends:
        kernels.warm_jit()

    print(f"backends: {', '.join(backends)}")
    header = f"{'workload':<42}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn in _workloads(args.quick):
        times = [_time(lambda b=b: fn(b)) for b in backends]
        row = f"{label:<42}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

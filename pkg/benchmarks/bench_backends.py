#!/usr/bin/env python3
"""Time the compiled kernels against the numpy twins.

Runs the hot paths (full IHT/ILAT recovery loops, the Gram operator-norm
iteration, bare top-s selection) under each available backend and prints
median wall times plus the speedup. Numbers move a lot between machines;
treat anything within ~10% as a tie.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --m 256 --d 512 --repeats 9
"""

import argparse
import statistics
import time

import numpy as np

from sparserec import _backend, linalg, recovery, sensing
from sparserec.recovery import Algorithm, RecoveryConfig


def time_once(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def median_time(fn, repeats):
    fn()  # warm caches, JIT-free but first call pays page faults
    return statistics.median(time_once(fn) for _ in range(repeats))


def build_cases(m, d, s, iters, seed):
    problem = sensing.build_problem(m, d, s, seed)
    iht_cfg = RecoveryConfig(algorithm=Algorithm.IHT, max_iters=iters, stop_tolerance=0.0)
    lat_cfg = RecoveryConfig(algorithm=Algorithm.ILAT, eta=0.5, max_iters=iters,
                             stop_tolerance=0.0)
    gram = problem.matrix.T @ problem.matrix
    keys = sensing.rng_for(seed, 1).standard_normal(d * 64)
    return {
        "iht loop": lambda: recovery.recover(problem, iht_cfg),
        "ilat loop": lambda: recovery.recover(problem, lat_cfg),
        "operator norm": lambda: linalg.operator_norm(gram),
        "top-s select": lambda: [_backend.active().top_s_indices(keys, s) for _ in range(200)],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=128)
    parser.add_argument("--d", type=int, default=256)
    parser.add_argument("--s", type=int, default=16)
    parser.add_argument("--iters", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = _backend.available_backends()
    if len(backends) < 2:
        print(f"only {backends[0]} is available; build the extension to compare")
    cases = build_cases(args.m, args.d, args.s, args.iters, args.seed)

    results = {}
    for name in backends:
        _backend.set_backend(name)
        results[name] = {label: median_time(fn, args.repeats) for label, fn in cases.items()}

    print(f"m={args.m} d={args.d} s={args.s} iters={args.iters} "
          f"(median of {args.repeats})")
    header = f"{'case':<16}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label in cases:
        row = f"{label:<16}"
        for b in backends:
            row += f"{results[b][label] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            py, cy = results["python"][label], results["cython"][label]
            row += f"{py / cy:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()

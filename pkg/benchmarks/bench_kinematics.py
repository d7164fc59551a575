#!/usr/bin/env python3
"""Benchmark the compiled kinematics kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kinematics.py [--repeats N]
"""

import argparse
import math
import random
import timeit

from linguomotor import _kinematics_py
from linguomotor.kinematics import COMPILED

try:
    from linguomotor import _speedups
except ImportError:
    _speedups = None


def make_cases(n, seed=1234):
    rng = random.Random(seed)
    return [
        (rng.uniform(-1, 1), rng.uniform(-math.pi, math.pi),
         rng.uniform(0, 10), rng.uniform(-3, 3))
        for _ in range(n)
    ]


def bench_closed_form(impl, cases, repeats):
    step = impl.unicycle_step

    def run():
        for v, omega, t, theta in cases:
            step(0.0, 0.0, theta, v, omega, t)

    best = min(timeit.repeat(run, number=1, repeat=repeats))
    return len(cases) / best


def bench_euler(impl, cases, repeats, dt=1e-3):
    final = impl.euler_final

    def run():
        for v, omega, t, theta in cases:
            final(0.0, 0.0, theta, v, omega, t, dt)

    best = min(timeit.repeat(run, number=1, repeat=repeats))
    steps = sum(int(t / dt) for _, _, t, _ in cases)
    return steps / best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, best-of")
    args = parser.parse_args()

    print(f"compiled extension available: {COMPILED}")
    closed_cases = make_cases(200_000)
    euler_cases = make_cases(200)

    rows = []
    pure_closed = bench_closed_form(_kinematics_py, closed_cases, args.repeats)
    pure_euler = bench_euler(_kinematics_py, euler_cases, args.repeats)
    rows.append(("pure python", pure_closed, pure_euler))
    if _speedups is not None:
        fast_closed = bench_closed_form(_speedups, closed_cases, args.repeats)
        fast_euler = bench_euler(_speedups, euler_cases, args.repeats)
        rows.append(("compiled", fast_closed, fast_euler))

    print(f"\n{'kernel':<14}{'closed-form steps/s':>22}{'euler steps/s':>18}")
    for name, closed, euler in rows:
        print(f"{name:<14}{closed:>22,.0f}{euler:>18,.0f}")
    if _speedups is not None:
        print(f"\nspeedup: closed-form {fast_closed / pure_closed:.1f}x, "
              f"euler {fast_euler / pure_euler:.1f}x")


if __name__ == "__main__":
    main()

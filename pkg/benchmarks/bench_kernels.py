#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Runs the three hot paths (Faddeeva array evaluation, exact-wave trace,
delta-barrier propagation) under the current backend, then re-runs
itself with DITSIM_NO_NUMBA=1 and prints both columns side by side.
"""
import json
import os
import subprocess
import sys
import time

import numpy as np


def timeit(fn, repeat=5):
    fn()  # warm up (and trigger jit compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmarks():
    from ditsim import backend_name, density_trace, make_carrier
    from ditsim import winter_model as wm
    from ditsim.faddeeva import wofz

    rng = np.random.default_rng(0)
    z = rng.uniform(-40, 40, 200_000) + 1j * rng.uniform(-5, 40, 200_000)

    c = make_carrier(-0.0015)
    t_grid = np.arange(100.0, 1200.0, 0.05)

    cfg = wm.WinterConfig(t_max=20.0, x_obs=20.0, x_max=60.0)

    results = {
        "backend": backend_name(),
        "wofz 2e5 pts": timeit(lambda: wofz(z)),
        "trace 22e3 pts": timeit(lambda: density_trace(c, 1000.0, t_grid)),
        "winter 2500 steps": timeit(lambda: wm.run(cfg), repeat=3),
    }
    return results


def main():
    mine = run_benchmarks()
    if os.environ.get("DITSIM_NO_NUMBA"):
        print(json.dumps(mine))
        return
    env = dict(os.environ, DITSIM_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, __file__], capture_output=True, text=True, env=env, check=True
    )
    other = json.loads(out.stdout.strip().splitlines()[-1])
    print(f"{'kernel':<20} {mine['backend']:>12} {other['backend']:>12} {'speedup':>9}")
    for key in mine:
        if key == "backend":
            continue
        a, b = mine[key], other[key]
        print(f"{key:<20} {a * 1e3:>10.2f}ms {b * 1e3:>10.2f}ms {b / a:>8.1f}x")


if __name__ == "__main__":
    main()

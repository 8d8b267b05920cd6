"""Compare the compiled and pure-Python sensing kernels.

Times one ``sense_all`` call at several swarm sizes, checks that both
backends return identical results, then times a short full trial under
each backend (the trial runs in a subprocess so the backend is chosen at
import, as in normal use).

    python3 benchmarks/bench_kernels.py [--repeat N] [--ticks N]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ktbt import kernels

TRIAL_SNIPPET = """
import time
from ktbt import kernels
from ktbt.sar import SimConfig, run_trial
cfg = SimConfig(composition=(0, 0, 3, 3, 3, 3), targets=(10, 10, 10, 10), iterations={ticks},
                arena=(550.0, 550.0), d_coms=110.0)
t = time.perf_counter()
run_trial(cfg, 0)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def make_inputs(n_robots, n_targets, side, seed=0):
    rng = np.random.default_rng(seed)
    rx, ry = rng.uniform(0, side, n_robots), rng.uniform(0, side, n_robots)
    tx, ty = rng.uniform(0, side, n_targets), rng.uniform(0, side, n_targets)
    ts = rng.integers(0, 3, n_targets).astype(np.int8)
    c = side / 3
    obstacles = np.array([[c - 20, c - 20, c + 20, c + 20], [2 * c - 20, 2 * c - 20, 2 * c + 20, 2 * c + 20]])
    return rx, ry, tx, ty, ts, obstacles


def bench_kernel(repeat):
    found = kernels.backends()
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'robots':>7} {'targets':>8} " + " ".join(f"{name + ' us':>14}" for name in found) + f" {'speedup':>8}")
    for n_robots, n_targets in ((12, 40), (40, 100), (100, 400), (400, 1600)):
        args = make_inputs(n_robots, n_targets, side=1000.0)
        results = {name: fn(*args, 30.0, 10.0) for name, fn in found.items()}
        first = next(iter(results.values()))
        assert all(r == first for r in results.values()), "backends disagree"
        times = {}
        for name, fn in found.items():
            number = max(1, repeat // max(1, n_robots // 12))
            best = min(timeit.repeat(lambda: fn(*args, 30.0, 10.0), number=number, repeat=3))
            times[name] = best / number * 1e6
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{n_robots:>7} {n_targets:>8} " + " ".join(f"{times[n]:>14.1f}" for n in found) + f" {speed:>7.1f}x")


def bench_trial(ticks):
    print(f"\nfull desk trial, {ticks} ticks:")
    for pure in ("0", "1"):
        env = dict(os.environ, KTBT_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", TRIAL_SNIPPET.format(ticks=ticks)],
                             env=env, capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"  {backend:>8}: {float(seconds):.2f} s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000, help="calls per timing at 12 robots")
    parser.add_argument("--ticks", type=int, default=3000, help="length of the full trial")
    args = parser.parse_args()
    bench_kernel(args.repeat)
    bench_trial(args.ticks)


if __name__ == "__main__":
    main()

"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_backends.py            # kernel table
    python3 benchmarks/bench_backends.py --pipeline # also a small end-to-end solve per backend

Outputs are compared before timing, so a fast but wrong kernel shows up.
"""
import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from polarsym import _kernels_np as npk
from polarsym._backend import HAVE_NUMBA

if not HAVE_NUMBA:
    sys.exit("numba is not installed; nothing to compare")
from polarsym import _kernels_nb as nbk


def cases(rng, scale):
    n_pts = int(2000 * scale)
    pts = rng.uniform(-0.55, 0.55, (n_pts, 3))
    caps = np.full(n_pts, 20.0)
    circ = 1 + rng.random(int(4096 * scale) // 2 * 2)
    # separable input: no early exit, both kernels scan every reflection
    sep = 2 + np.cos(2 * np.pi * np.arange(circ.size) / circ.size)
    sgrid = 1 + rng.random((65, 128))
    sgrid[0], sgrid[-1] = sgrid[0, 0], sgrid[-1, 0]
    colat = rng.uniform(0, np.pi, int(200_000 * scale))
    lon = rng.uniform(0, 2 * np.pi, colat.size)
    vol = rng.random((25, 25, 25))
    q = rng.uniform(-0.9, 0.9, (int(100_000 * scale), 3))
    origin = np.full(3, -1.0)
    return [
        ("green_matrix", lambda k: k.green_matrix(pts, caps, 1.0, 1, True), f"{n_pts} points"),
        ("circle_first_violation", lambda k: k.circle_first_violation(sep, 1e-9), f"n={sep.size}"),
        ("circle_severities", lambda k: k.circle_severities(circ, 1e-9), f"n={circ.size}"),
        ("sphere_interp", lambda k: k.sphere_interp(sgrid, colat, lon), f"{colat.size} queries"),
        ("cubic_interp3", lambda k: k.cubic_interp3(vol, origin, 1 / 12, q), f"{len(q)} queries"),
    ]


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(scale, repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'size':>18}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, call, size in cases(rng, scale):
        a, b = call(nbk), call(npk)  # first call also pays the JIT compile
        if not np.allclose(a, b, rtol=1e-12, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        t_nb = best_of(lambda: call(nbk), repeat)
        t_np = best_of(lambda: call(npk), repeat)
        print(f"{name:<24}{size:>18}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


PIPELINE = """
import time
from polarsym.choquard import ChoquardProblem, solve_ground_state
t = time.perf_counter()
prob = ChoquardProblem(n={n})
prob.K
k = time.perf_counter() - t
gs = solve_ground_state(prob)
print(k, time.perf_counter() - t - k, gs.energy)
"""


def pipeline(n):
    print(f"\nground-state solve, n={n} (kernel build / descent, fresh process per backend)")
    for backend in ("numba", "numpy"):
        env = dict(os.environ, POLARSYM_BACKEND=backend)
        t = time.perf_counter()
        out = subprocess.run([sys.executable, "-c", PIPELINE.format(n=n)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        wall = time.perf_counter() - t
        print(f"  {backend:<6} K {float(out[0]):7.2f}s  solve {float(out[1]):7.2f}s  "
              f"wall {wall:7.2f}s  c={float(out[2]):.10f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0, help="problem size multiplier")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--pipeline", action="store_true")
    ap.add_argument("--n", type=int, default=16, help="mesh size for --pipeline")
    args = ap.parse_args()
    kernel_table(args.scale, args.repeat)
    if args.pipeline:
        pipeline(args.n)


if __name__ == "__main__":
    main()

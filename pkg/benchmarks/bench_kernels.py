"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Kernel timings call both implementations directly. End-to-end solves run in
child processes so each one imports the package with its own backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from rectiplan._kernels import numba_impl, numpy_impl

SOLVE_SNIPPET = """
import time
from rectiplan.discretization import build_grid
from rectiplan.single_phase import SinglePhaseSpec, solve_single_phase
from rectiplan.three_phase import ThreePhaseSpec, solve_three_phase
from rectiplan.oracle import enumerate_three
b = {2: 0, 4: 0, 6: 0}
solve_single_phase(SinglePhaseSpec(N=16, dc_target=0.2), build_grid(16))  # compile
jobs = [
    ("single N=512", lambda: solve_single_phase(
        SinglePhaseSpec(N=512, dc_target=0.2, lam=10, voltage_harmonic_bindings=b), build_grid(512))),
    ("three N=192", lambda: solve_three_phase(
        ThreePhaseSpec(N=192, dc_target=0.8, lam=10, voltage_harmonic_bindings=b), build_grid(192))),
    ("oracle three N=8", lambda: enumerate_three(
        ThreePhaseSpec(N=8, dc_interval=(0.75, 0.85), lam=10), build_grid(8))),
]
for name, job in jobs:
    t0 = time.perf_counter(); job(); print(f"{name}\\t{time.perf_counter() - t0:.3f}")
"""


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases():
    rng = np.random.default_rng(0)
    T = rng.normal(size=(600, 1800))

    N, m = 10, 3
    F = np.ascontiguousarray(rng.normal(size=(N, m, 3)) * 0.1)
    C = np.ascontiguousarray(np.abs(rng.normal(size=(N, m))))
    lo, hi = np.full(3, -0.3), np.full(3, 0.3)

    v = rng.normal(size=4096)
    alpha = float(np.exp(-1.0 / (4096 * 50 * 0.02)))
    return {
        "pivot 600x1800": lambda impl: impl.pivot(T.copy(), 10, 20),
        "enumerate 3^10": lambda impl: impl.enumerate_range(F, C, lo, hi, 0, m ** N),
        "rl_response 4096x10": lambda impl: impl.rl_response(v, alpha, 10),
    }


def end_to_end():
    rows = {}
    for backend in ("numba", "numpy"):
        env = {**os.environ, "RECTIPLAN_BACKEND": backend}
        out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET], env=env, check=True,
                             capture_output=True, text=True).stdout
        for line in out.strip().splitlines():
            name, secs = line.split("\t")
            rows.setdefault(name, {})[backend] = float(secs)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-solve", action="store_true", help="kernels only")
    args = ap.parse_args()

    print(f"{'case':<24}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, run in kernel_cases().items():
        run(numba_impl)  # compile outside the timing
        a = best_of(lambda: run(numba_impl), args.repeat)
        b = best_of(lambda: run(numpy_impl), args.repeat)
        print(f"{name:<24}{a:>12.5f}{b:>12.5f}{b / a:>9.1f}x")
    if not args.skip_solve:
        for name, t in end_to_end().items():
            print(f"{name:<24}{t['numba']:>12.3f}{t['numpy']:>12.3f}{t['numpy'] / t['numba']:>9.1f}x")


if __name__ == "__main__":
    main()

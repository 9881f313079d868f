"""Timing comparison of the compiled harmonic kernels against the numpy fallback.

Each case runs in a subprocess so the backend choice (FUZZYSPHERE_PURE_PYTHON)
is made at import time, exactly as a user would experience it.

Usage: python3 benchmarks/bench_kernels.py [--quick]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, sys, time
import numpy as np
import fuzzysphere as fs
from fuzzysphere import backend

case, reps = sys.argv[1], int(sys.argv[2])
rng = np.random.default_rng(0)

def timeit(fn):
    fn()  # warm up
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

if case == "basis":
    n = 4000
    theta = np.arccos(rng.uniform(-1, 1, n))
    phi = rng.uniform(0, 2 * np.pi, n)
    t = timeit(lambda: backend.basis(24, theta, phi))
elif case == "synth":
    n = 20000
    theta = np.arccos(rng.uniform(-1, 1, n))
    phi = rng.uniform(0, 2 * np.pi, n)
    coeffs = rng.standard_normal(13 * 13)
    t = timeit(lambda: backend.synth(coeffs, 12, theta, phi))
elif case == "coherent":
    n = 3000
    theta = np.arccos(rng.uniform(-1, 1, n))
    phi = rng.uniform(0, 2 * np.pi, n)
    t = timeit(lambda: backend.coherent(64, theta, phi))
elif case == "markov":
    f = fs.random_function(4, seed=1)
    rho = fs.rho_isotropic(0.5)
    t = timeit(lambda: fs.markov_smear_apply(f, rho, 0.05))
else:
    raise SystemExit(f"unknown case {case}")
print(json.dumps({"case": case, "backend": backend.BACKEND, "best_s": t}))
"""


def run_case(case, reps, pure):
    env = dict(os.environ)
    if pure:
        env["FUZZYSPHERE_PURE_PYTHON"] = "1"
    else:
        env.pop("FUZZYSPHERE_PURE_PYTHON", None)
    out = subprocess.run(
        [sys.executable, "-c", WORKER, case, str(reps)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="fewer repetitions")
    args = ap.parse_args()
    reps = 2 if args.quick else 5

    cases = ["basis", "synth", "coherent", "markov"]
    print(f"{'case':<10} {'compiled':>12} {'pure numpy':>12} {'speedup':>9}")
    for case in cases:
        fast = run_case(case, reps, pure=False)
        slow = run_case(case, reps, pure=True)
        if fast["backend"] == slow["backend"]:
            print(f"{case:<10} backend did not switch; check the build")
            continue
        ratio = slow["best_s"] / fast["best_s"]
        print(
            f"{case:<10} {fast['best_s']*1e3:>10.2f}ms {slow['best_s']*1e3:>10.2f}ms"
            f" {ratio:>8.2f}x"
        )


if __name__ == "__main__":
    main()

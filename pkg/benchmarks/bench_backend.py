#!/usr/bin/env python3
"""Benchmark: compiled vs pure-NumPy power-minimization kernel.

Runs identical SINR-constrained power-minimization instances through both
kernel implementations and reports wall time and agreement. Also times one
full planning run per backend on the shipped demo scenario.

Usage: python benchmarks/bench_backend.py [--repeats N] [--seed S]
"""

import argparse
import math
import statistics
import time

import numpy as np

from hopbeam import _duality_py

try:
    from hopbeam import _duality as compiled
except ImportError:
    compiled = None


def random_instance(rng, n, m, gamma_scale):
    rows = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) \
        / math.sqrt(2)
    gammas = gamma_scale * rng.uniform(0.5, 2.0, n)
    return rows, gammas


def time_kernel(impl, instances, repeats):
    best = math.inf
    result_sum = 0.0
    for _ in range(repeats):
        start = time.perf_counter()
        result_sum = 0.0
        for rows, gammas in instances:
            status, _, dl, _, _ = impl.duality_power_min(rows, gammas, 1.0,
                                                         1e15)
            if status == _duality_py.STATUS_OK:
                result_sum += dl
        best = min(best, time.perf_counter() - start)
    return best, result_sum


def bench_kernels(args):
    rng = np.random.default_rng(args.seed)
    cases = [
        ("small   (n=3,  m=8,  gamma~1e1)", 3, 8, 1e1, 200),
        ("medium  (n=5,  m=20, gamma~1e3)", 5, 20, 1e3, 100),
        ("large   (n=10, m=32, gamma~1e5)", 10, 32, 1e5, 50),
    ]
    print(f"{'case':36s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, n, m, gscale, count in cases:
        instances = [random_instance(rng, n, m, gscale) for _ in range(count)]
        t_py, sum_py = time_kernel(_duality_py, instances, args.repeats)
        line = f"{label:36s} {t_py * 1e3:8.1f}ms"
        if compiled is not None:
            t_c, sum_c = time_kernel(compiled, instances, args.repeats)
            rel = abs(sum_py - sum_c) / max(abs(sum_py), 1e-30)
            line += f" {t_c * 1e3:8.1f}ms {t_py / t_c:7.2f}x"
            if rel > 1e-6:
                line += f"  (MISMATCH rel={rel:.2e})"
        else:
            line += "  (compiled kernel unavailable)"
        print(line)


def bench_pipeline(args):
    import importlib.resources
    import subprocess
    import sys

    path = str(importlib.resources.files("hopbeam") / "data" / "paper16.json")
    code = (
        "import time; from hopbeam import load_scenario, run_pipeline, RunOptions; "
        f"scn = load_scenario({path!r}); "
        "t0 = time.perf_counter(); r = run_pipeline(scn, 'multi', RunOptions()); "
        "print(f'{time.perf_counter() - t0:.3f}s  objective={r.objective:.6f}')"
    )
    for env_flag, label in (("0", "compiled"), ("1", "python")):
        times = []
        for _ in range(args.repeats):
            out = subprocess.run(
                [sys.executable, "-c", code],
                env={"HOPBEAM_PURE_PYTHON": env_flag, "PATH": "/usr/bin:/bin"},
                capture_output=True, text=True)
            if out.returncode != 0:
                print(f"pipeline [{label}]: failed\n{out.stderr}")
                break
            times.append(out.stdout.strip())
        else:
            print(f"pipeline [{label:8s}]: " + "  ".join(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    print("# kernel micro-benchmark (best of "
          f"{args.repeats}, identical instances)")
    bench_kernels(args)
    print("\n# full planning run on the demo scenario")
    bench_pipeline(args)


if __name__ == "__main__":
    main()

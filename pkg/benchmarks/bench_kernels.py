"""Hot-kernel timing: numba backend against the pure-numpy fallback.

HEUNX_NUMBA is read once at import, so each backend runs in its own
subprocess (--child); the parent collects both timing sets and prints them
side by side. Workloads are deterministic, so the backends do identical work
and the first warmup call absorbs jit compilation.

Usage: python benchmarks/bench_kernels.py [--repeat 20]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def benchmark(func, n_warmup=2, n_iter=20):
    """Median wall time of func() in ms."""
    for _ in range(n_warmup):
        func()
    times = []
    for _ in range(n_iter):
        start = time.perf_counter()
        func()
        times.append((time.perf_counter() - start) * 1e3)
    return float(np.median(times))


def workloads():
    from heunx import (evaluate_expansion, frobenius_coefficients,
                       q_candidates_N0, q_candidates_N2,
                       solve_reduction_general, three_term_coefficients)

    anchor = q_candidates_N0(2.0, 3.0, 2.0, 1.0)[0]
    n2 = q_candidates_N2(2.0, 2.5, 1.7, 0.6)[0]
    zs = np.linspace(-0.9, 0.9, 41)

    return [
        ("three-term stream, n=5000",
         lambda: three_term_coefficients(anchor.params, 5000)),
        ("two-term vs three-term check, n=2000",
         lambda: three_term_coefficients(n2.params, 2000)),
        ("expansion eval, 41-point grid",
         lambda: [evaluate_expansion(anchor, float(z)) for z in zs]),
        ("general reduction solve, N=2",
         lambda: solve_reduction_general(2.0, 2.5, 1.7, 0.6, 2)),
        ("power-series oracle, 2000 terms",
         lambda: frobenius_coefficients(anchor.params, 2000)),
    ]


def run_child(n_iter):
    from heunx import backend_name

    results = {name: benchmark(func, n_iter=n_iter)
               for name, func in workloads()}
    print(json.dumps({"backend": backend_name(), "results": results}))


def run_parent(n_iter):
    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, HEUNX_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__),
             "--child", "--repeat", str(n_iter)],
            env=env, capture_output=True, text=True, check=True)
        payload = json.loads(out.stdout.strip().splitlines()[-1])
        rows[flag] = payload
        print(f"backend HEUNX_NUMBA={flag}: {payload['backend']}")

    names = list(rows["1"]["results"])
    width = max(len(n) for n in names)
    print()
    print(f"{'workload':<{width}}  {'numba ms':>9}  {'numpy ms':>9}  {'speedup':>7}")
    print("-" * (width + 31))
    for name in names:
        t_nb = rows["1"]["results"][name]
        t_np = rows["0"]["results"][name]
        print(f"{name:<{width}}  {t_nb:9.3f}  {t_np:9.3f}  {t_np / t_nb:6.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20,
                    help="timed iterations per workload (default 20)")
    ap.add_argument("--child", action="store_true",
                    help="time the current backend and emit JSON (internal)")
    args = ap.parse_args()
    if args.child:
        run_child(args.repeat)
    else:
        run_parent(args.repeat)


if __name__ == "__main__":
    main()

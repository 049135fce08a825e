#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the pure-Python twin.

Times the four kernel entry points on representative small-matrix
workloads plus one end-to-end verification suite, and prints a table with
the speedup.  Run from a built checkout:

    python benchmarks/bench_backends.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from matleg import _pykern
from matleg import matrix_core as mc

try:
    from matleg import _ckern
except ImportError:
    _ckern = None


def bench(fn, repeat: int, inner: int) -> float:
    """Best-of-``repeat`` wall time for ``inner`` calls, in seconds."""
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_workloads(rng):
    a3 = rng.uniform(-1.0, 1.0, (3, 3))
    a4 = rng.uniform(-1.0, 1.0, (4, 4))
    a6 = rng.uniform(-1.0, 1.0, (6, 6))
    a34 = rng.uniform(-1.0, 1.0, (3, 4))
    rs = mc._index_matrix(mc.index_sets(3, 2))
    cs = mc._index_matrix(mc.index_sets(4, 2))
    rows = mc.index_sets(3, 2)[0].zero_based()
    cols = mc.index_sets(4, 2)[0].zero_based()
    return [
        ("det 3x3", lambda k: k.det(a3), 20000),
        ("det 4x4 (elimination)", lambda k: k.det(a4), 10000),
        ("det 6x6 (elimination)", lambda k: k.det(a6), 5000),
        ("cofactor_matrix 3x3", lambda k: k.cofactor_matrix(a3), 10000),
        ("cofactor_matrix 4x4", lambda k: k.cofactor_matrix(a4), 5000),
        ("minor_dets 3x4 k=2", lambda k: k.minor_dets(a34, rs, cs), 5000),
        ("minor_gradient 3x4 k=2", lambda k: k.minor_gradient(a34, rows, cols), 5000),
    ]


_SUITE_SNIPPET = """
import time
from matleg import SampleSpec, det_power, kernel_backend
from matleg import duality_engine as engine
spec = SampleSpec(family=det_power(3, 4.0), count=100, seed=3)
engine.run_suite(spec, threads=1)  # warm up
t0 = time.perf_counter()
engine.run_suite(spec, threads=1)
print(time.perf_counter() - t0)
"""


def suite_time(backend_name: str) -> float:
    """End-to-end suite wall time in a subprocess pinned to one backend."""
    out = subprocess.run(
        [sys.executable, "-c", _SUITE_SNIPPET],
        env={**os.environ, "MATLEG_BACKEND": backend_name},
        capture_output=True,
        text=True,
        check=True,
    )
    return float(out.stdout.strip())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    if _ckern is None:
        print("compiled extension not built; nothing to compare")
        return 1

    rng = np.random.default_rng(99)
    rows = []
    for name, fn, inner in kernel_workloads(rng):
        t_c = bench(lambda: fn(_ckern), args.repeat, inner)
        t_p = bench(lambda: fn(_pykern), args.repeat, inner)
        rows.append((name, inner, t_c, t_p))

    # end-to-end comparison in subprocesses (the backend is fixed at import)
    t_suite_c = suite_time("compiled")
    t_suite_p = suite_time("python")
    rows.append(("verification suite, 100 samples", 1, t_suite_c, t_suite_p))

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'calls':>6}  {'compiled':>10}  {'python':>10}  {'speedup':>7}")
    for name, inner, t_c, t_p in rows:
        print(
            f"{name:<{width}}  {inner:>6}  {t_c * 1e3:>8.2f}ms  {t_p * 1e3:>8.2f}ms  {t_p / t_c:>6.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

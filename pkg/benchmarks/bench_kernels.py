"""Compare the numpy and numba kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--sizes 256,1024,4096]

Part one times each kernel in-process through both namespaces of
``tempered_wsgd._kernels``.  Part two times an end-to-end diffusion solve
and a stability scan in fresh interpreters with ``TEMPERED_WSGD_BACKEND``
set, so import and compilation cost are reported separately from the
steady-state run.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from tempered_wsgd import _kernels

END_TO_END = r"""
import json, time
t0 = time.perf_counter()
from tempered_wsgd.diffusion_solver import DiffusionProblem, solve
from tempered_wsgd.mms import make_case
from tempered_wsgd.stability import scan_generating_function
case = make_case("diff-two-sided")
prob = DiffusionProblem.from_case(case)
solve(prob, 3, 16, 4, -0.02)
scan_generating_function(3, 1.5, 1.0, 0.01, -0.03, 250, 4096)
t1 = time.perf_counter()
solve(prob, 3, 256, 1000, -0.02)
t2 = time.perf_counter()
for g in (-0.04, -0.03, -0.02, -0.01):
    scan_generating_function(3, 1.5, 1.0, 0.01, g, 2000, 16384)
t3 = time.perf_counter()
print(json.dumps({"startup": t1 - t0, "solve": t2 - t1, "scan": t3 - t2}))
"""


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases(n):
    rng = np.random.default_rng(0)
    om = _kernels.NUMPY.gruenwald(1.5, n)
    off = np.array([0, 1, 2, 3], dtype=np.int64)
    gam = rng.normal(size=4)
    g = rng.normal(size=n + 2)
    u = rng.normal(size=n + 1)
    x = np.linspace(-np.pi, np.pi, 4096)
    return {
        "gruenwald": (1.5, n),
        "wsgd_weights": (om, off, gam, 1.0, 1.0 / n, n),
        "hessenberg_toeplitz": (g, 0.1, min(n, 2048)),
        "stencil_apply": (g, 0.1, u),
        "cosine_series": (g[: min(n, 2000)], 0.1, x),
    }


def bench_kernels(sizes, repeat):
    rows = []
    for n in sizes:
        for name, args in kernel_cases(n).items():
            row = {"kernel": name, "n": n}
            for ns in (_kernels.NUMPY, _kernels.NUMBA):
                if ns is None:
                    continue
                fn = getattr(ns, name)
                fn(*args)  # compile / warm caches
                row[ns.name] = _best(lambda: fn(*args), repeat)
            rows.append(row)
    return rows


def bench_end_to_end():
    out = {}
    for backend in ("numpy", "numba"):
        env = dict(os.environ, TEMPERED_WSGD_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        out[backend] = json.loads(res.stdout.strip().splitlines()[-1])
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="256,1024,4096")
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    if _kernels.NUMBA is None:
        print("numba is not installed; only the numpy timings are shown")
    print(f"{'kernel':<22}{'n':>6}{'numpy [ms]':>14}{'numba [ms]':>14}{'speedup':>10}")
    for r in bench_kernels(sizes, args.repeat):
        npt, nbt = r["numpy"] * 1e3, r.get("numba", float("nan")) * 1e3
        print(f"{r['kernel']:<22}{r['n']:>6}{npt:>14.4f}{nbt:>14.4f}{npt / nbt:>10.1f}")

    if not args.skip_end_to_end:
        e2e = bench_end_to_end()
        print()
        print(f"{'stage':<34}{'numpy [s]':>12}{'numba [s]':>12}")
        labels = {
            "startup": "import + first solve (compile)",
            "solve": "diffusion solve M=256, 1000 steps",
            "scan": "4 scans, N=2000, 16384 points",
        }
        for key, label in labels.items():
            print(f"{label:<34}{e2e['numpy'][key]:>12.3f}{e2e['numba'][key]:>12.3f}")


if __name__ == "__main__":
    main()

"""Benchmark the compiled kernels against the pure-Python (numpy) ones.

Usage: python3 benchmarks/bench_kernels.py [--paths N] [--steps n] [--reps r]

Times em_block / em_block_full / trunc_block on the same pre-generated
noise and reports the speedup, plus a cross-check that the two backends
agree (bit-identical for p = 1/2).
"""

import argparse
import time

import numpy as np

from cevsim import _kernels_py, rng
from cevsim.backend import available_backends


def _time(fn, reps):
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=2000)
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        raise SystemExit("compiled extension not built; nothing to compare")
    cy = backends["compiled"]

    xi = np.vstack(
        [rng.path_normals(0, j, args.steps) for j in range(args.paths)]
    )
    dt = 3.0 / args.steps
    cases = [
        ("em_block      p=0.50", "em_block", (0.25, -1.0, 1.0, 0.5, dt, xi)),
        ("em_block      p=0.75", "em_block", (0.25, -1.0, 1.0, 0.75, dt, xi)),
        ("em_block_full p=0.50", "em_block_full", (1.0, 1.0, 1.0, 0.5, dt, xi)),
        ("trunc_block   p=0.50", "trunc_block", (0.25, -1.0, 1.0, 0.5, 1e-3, dt, xi)),
    ]

    print(f"paths={args.paths} steps={args.steps} reps={args.reps} (best of)")
    print(f"{'kernel':<22} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, name, fargs in cases:
        t_py, out_py = _time(lambda: getattr(_kernels_py, name)(*fargs), args.reps)
        t_cy, out_cy = _time(lambda: getattr(cy, name)(*fargs), args.reps)
        a, b = np.asarray(out_py[0]), np.asarray(out_cy[0])
        tag = "exact" if np.array_equal(a, b) else f"max|d|={np.max(np.abs(a - b)):.2e}"
        print(f"{label:<22} {t_py * 1e3:>8.1f}ms {t_cy * 1e3:>8.1f}ms "
              f"{t_py / t_cy:>7.1f}x  agree: {tag}")


if __name__ == "__main__":
    main()

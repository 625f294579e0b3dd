"""Benchmark the compiled Jacobi eigensolver against the pure-python path.

Runs the same kernel twice: once as compiled by numba (unless
``ISOPARA_NO_NUMBA`` is set, in which case only the fallback exists) and once
as the uncompiled python function, over a batch of random symmetric matrices
of several sizes.  Prints per-call timings and the speedup.

Usage: python3 benchmarks/bench_kernels.py [--sizes 4,8,16,32] [--reps 200]
"""
import argparse
import time

import numpy as np

from isopara import _kernels


def bench(fn, mats, reps):
    # warm-up (trigger JIT compilation outside the timed region)
    fn(mats[0], 50, 1e-14)
    t0 = time.perf_counter()
    for _ in range(reps):
        for A in mats:
            fn(A, 50, 1e-14)
    return (time.perf_counter() - t0) / (reps * len(mats))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="4,8,16,32")
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    compiled = _kernels.jacobi_eigh if _kernels.USE_NUMBA else None
    fallback = getattr(_kernels.jacobi_eigh, "py_func", _kernels.jacobi_eigh)

    print(f"numba path: {'on' if compiled else 'off (ISOPARA_NO_NUMBA set)'}")
    header = f"{'n':>4}  {'python (us)':>12}"
    if compiled:
        header += f"  {'numba (us)':>11}  {'speedup':>8}"
    print(header)
    for n in sizes:
        mats = []
        for _ in range(10):
            B = rng.standard_normal((n, n))
            mats.append((B + B.T) / 2.0)
        # fewer reps for the slow path on big matrices
        reps_py = max(1, args.reps // max(1, n // 8))
        t_py = bench(fallback, mats, reps_py)
        line = f"{n:>4}  {t_py * 1e6:>12.1f}"
        if compiled:
            t_nb = bench(compiled, mats, args.reps)
            line += f"  {t_nb * 1e6:>11.1f}  {t_py / t_nb:>7.1f}x"
        print(line)

        # sanity: both paths reconstruct A
        w, V, _, conv = fallback(mats[0], 50, 1e-14)
        assert conv
        assert np.linalg.norm(V @ np.diag(w) @ V.T - mats[0]) < 1e-10 * n


if __name__ == "__main__":
    main()

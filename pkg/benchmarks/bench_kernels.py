"""Benchmark both backends of every hot kernel in zetalab._kernels.

Each kernel ships a numba ``@njit`` implementation and a pure-numpy
fallback (selected at import time by ``ZETALAB_KERNELS``). This script
times the two implementations on workloads shaped like the real call
sites and prints a comparison table; it is a reporting tool, not a test
(cross-backend agreement is asserted in tests/test_kernels.py).

Usage::

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import timeit

import numpy as np

from zetalab import _kernels
from zetalab.arith import sieve_tables
from zetalab.weights import make_bump_weight


def build_workloads(quick: bool):
    """Return [(kernel, description, args)] mirroring production call sites."""
    scale = 10 if quick else 1
    n_eval = 1_000_000 // scale
    n_grid = 2_000_000 // scale
    limit = 200_000 // scale

    weight = make_bump_weight()
    step, a0, a1, a2, a3 = weight.spline_arrays()
    tables = sieve_tables(200_000)

    rng = np.random.default_rng(7)

    ys = rng.uniform(-0.1, 1.1, n_eval)
    xs = rng.uniform(0.3, 2.2, n_eval)

    # power-sum style grid: 33 terms, drifts below 1/(10A), window [A, 2A]
    r = 33
    a_param = 10.0
    z_re = rng.uniform(-0.01, 0.01, r)
    z_im = np.concatenate([[0.0], rng.uniform(0.0, 4.0, r - 1)])
    c_re = rng.normal(0.0, 0.7, r)
    c_im = rng.normal(0.0, 0.07, r)
    dt = a_param / (n_grid - 1)

    spf = _kernels.implementations("sieve_spf")["numpy"](limit)

    # prime-power window around scale 2e4, as in detector sweeps
    npp, lam_pp, log_pp = tables.prime_powers()
    lo = int(np.searchsorted(npp, 1.0e4))
    hi = int(np.searchsorted(npp, 4.0e4))
    amp = np.ascontiguousarray(lam_pp[lo:hi] * np.exp(-0.5 * log_pp[lo:hi]))
    logs = np.ascontiguousarray(log_pp[lo:hi])

    ph = -100.0 * log_pp
    m_re = np.ascontiguousarray(lam_pp * np.cos(ph))
    m_im = np.ascontiguousarray(lam_pp * np.sin(ph))
    us = np.ascontiguousarray(np.geomspace(100.0, 1.0e4, 600 // scale + 6))
    nsf = np.ascontiguousarray(npp.astype(np.float64))

    return [
        ("spline_cdf_eval", f"{n_eval:,} points",
         (ys, step, a0, a1, a2, a3)),
        ("w0_eval", f"{n_eval:,} points",
         (xs, step, a0, a1, a2, a3)),
        ("exp_abs_grid", f"{r} terms x {n_grid:,} grid points",
         (z_re, z_im, c_re, c_im, a_param, dt, n_grid)),
        ("sieve_spf", f"limit {limit:,}", (limit,)),
        ("tables_from_spf", f"limit {limit:,}", (spf,)),
        ("moll_window", "window [50k, 120k], cap 2000",
         (50_000, 120_000, 2_000, tables.mu)),
        ("phased_sum", f"{amp.size:,} terms, one ordinate",
         (amp, logs, 1.0e4)),
        ("weighted_window_sweep", f"{us.size} scales x {nsf.size:,} table",
         (nsf, m_re, m_im, us, step, a0, a1, a2, a3)),
    ]


def best_seconds(fn, args, repeat: int) -> float:
    fn(*args)  # warm-up (JIT compile / cache load)
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true",
                    help="10x smaller workloads")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions per kernel (default 3)")
    args = ap.parse_args()

    backends = sorted(_kernels.implementations("w0_eval"))
    print(f"active backend: {_kernels.BACKEND}   "
          f"numba available: {_kernels.HAVE_NUMBA}")
    if "numba" not in backends:
        print("numba not importable; timing the numpy fallback only\n")

    rows = []
    for name, desc, wargs in build_workloads(args.quick):
        impls = _kernels.implementations(name)
        times = {b: best_seconds(impls[b], wargs, args.repeat)
                 for b in backends}
        rows.append((name, desc, times))

    width = max(len(r[0]) for r in rows)
    dwidth = max(len(r[1]) for r in rows)
    header = f"{'kernel':<{width}}  {'workload':<{dwidth}}"
    for b in backends:
        header += f"  {b + ' (ms)':>12}"
    if "numba" in backends and "numpy" in backends:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, desc, times in rows:
        line = f"{name:<{width}}  {desc:<{dwidth}}"
        for b in backends:
            line += f"  {1e3 * times[b]:>12.3f}"
        if "numba" in times and "numpy" in times:
            line += f"  {times['numpy'] / times['numba']:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()

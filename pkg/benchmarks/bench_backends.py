#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallbacks.

Each hot kernel in mixdens._fast ships in both flavors; this script runs
them on workload-shaped inputs and prints the per-call times plus the
speedup. It also times the BLAS-batched bootstrap EM (em_batch) against
solving the same replicates one by one with em_loop, which is the design
decision that batching is meant to justify.

Usage: python benchmarks/bench_backends.py [--repeat 5] [--quick]
"""

import argparse
import time

import numpy as np

from mixdens import _fast, data, kernels, npmle
from mixdens.backend import HAVE_NUMBA


def best_of(fn, repeat):
    out = None
    t = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        t = min(t, time.perf_counter() - t0)
    return t, out


def check_close(a, b, what):
    if not np.allclose(a, b, rtol=1e-10, atol=1e-12):
        raise SystemExit(f"{what}: backend results disagree")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true",
                    help="smaller shapes (CI smoke run)")
    args = ap.parse_args()

    if not HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    n = 200 if args.quick else 1000
    grid_m = 100 if args.quick else 400
    B = 10 if args.quick else 50
    C = 200 if args.quick else 800   # S_z * l of a reduced stage-I batch
    D = 100                          # Monte Carlo draws per MCEM estimate
    rows = []

    m = data.sim_model("gmm")
    y, _ = data.simulate(m, n, 0)
    grid = npmle.default_grid(y, m.kernel, grid_m)
    A, _ = npmle._scaled_likelihood(y, m.kernel, grid.points)
    w = np.ones(n)
    pi0 = np.full(grid_m, 1.0 / grid_m)

    # warm the JIT caches before timing anything
    _fast.em_loop_nb(A[:8], w[:8], pi0, 1e-6, 5)
    _fast.mix_objective_nb(y[:8], w[:8], np.zeros(4), np.zeros(4),
                           np.zeros(8), np.zeros(4), np.zeros(4))
    _fast.logf_mean_draws_nb(y[:8], np.zeros((4, 4)), np.zeros((4, 4)))
    _fast.kde_gauss_nb(np.linspace(0, 1, 8), np.zeros(4), np.full(4, 0.25), 1.0)

    t_np, r_np = best_of(lambda: _fast.em_loop_np(A, w, pi0, 1e-8, 500), args.repeat)
    t_nb, r_nb = best_of(lambda: _fast.em_loop_nb(A, w, pi0, 1e-8, 500), args.repeat)
    check_close(r_np[0], r_nb[0], "em_loop")
    rows.append(("em_loop (NPMLE EM sweep)", f"n={n} m={grid_m} 500 sweeps", t_np, t_nb))

    rng = np.random.default_rng(0)
    eta_all, off_all = kernels.expfam_parts(m.kernel, np.sort(rng.normal(0, 3, C)))
    base = kernels.expfam_base(m.kernel, y)
    T0a, T1a = np.zeros(C), np.zeros(C)
    T0b, T1b = np.zeros(C), np.zeros(C)
    t_np, r_np = best_of(
        lambda: _fast.mix_objective_np(y, w, eta_all, off_all, base, T0a, T1a),
        args.repeat)
    t_nb, r_nb = best_of(
        lambda: _fast.mix_objective_nb(y, w, eta_all, off_all, base, T0b, T1b),
        args.repeat)
    check_close(r_np, r_nb, "mix_objective")
    rows.append(("mix_objective (stage-I loss)", f"n={n} C={C}", t_np, t_nb))

    theta = kernels.to_support(m.kernel, rng.normal(0, 2, (D, 100)))
    eta, off = kernels.expfam_parts(m.kernel, theta)
    etaT = np.ascontiguousarray(eta.T)
    offT = np.ascontiguousarray(off.T)
    yu = np.unique(np.round(y, 1))
    t_np, r_np = best_of(lambda: _fast.logf_mean_draws_np(yu, etaT, offT), args.repeat)
    t_nb, r_nb = best_of(lambda: _fast.logf_mean_draws_nb(yu, etaT, offT), args.repeat)
    check_close(r_np, r_nb, "logf_mean_draws")
    rows.append(("logf_mean_draws (MCEM E-step)", f"U={yu.size} l=100 D={D}",
                 t_np, t_nb))

    gx = np.linspace(y.min(), y.max(), 2001)
    xs = np.ascontiguousarray(rng.choice(y, 3000))
    wts = np.full(xs.size, 1.0 / xs.size)
    t_np, r_np = best_of(lambda: _fast.kde_gauss_np(gx, xs, wts, 0.3), args.repeat)
    t_nb, r_nb = best_of(lambda: _fast.kde_gauss_nb(gx, xs, wts, 0.3), args.repeat)
    check_close(r_np, r_nb, "kde_gauss")
    rows.append(("kde_gauss (ensemble KDE)", f"grid=2001 pts={xs.size}", t_np, t_nb))

    print(f"numba vs numpy backends (best of {args.repeat})")
    print(f"{'kernel':34s} {'shape':24s} {'numpy':>9s} {'numba':>9s} {'speedup':>8s}")
    for name, shape, t_np, t_nb in rows:
        print(f"{name:34s} {shape:24s} {t_np:8.4f}s {t_nb:8.4f}s {t_np / t_nb:7.2f}x")

    # batched vs sequential bootstrap EM (independent of the backend choice)
    g = rng.exponential(size=(B, n))
    Wmat = np.ascontiguousarray((n * g / g.sum(axis=1, keepdims=True)).T)
    sweeps = 200
    t_seq, _ = best_of(
        lambda: [_fast.em_loop(A, np.ascontiguousarray(Wmat[:, b]), pi0, 0.0, sweeps)
                 for b in range(B)], 1)
    t_bat, _ = best_of(lambda: _fast.em_batch(A, Wmat, 0.0, sweeps), 1)
    print(f"\nbootstrap EM, B={B} replicates x {sweeps} sweeps "
          f"(n={n}, m={grid_m})")
    print(f"{'sequential em_loop':34s} {t_seq:8.2f}s")
    print(f"{'batched em_batch':34s} {t_bat:8.2f}s {t_seq / t_bat:7.2f}x")


if __name__ == "__main__":
    main()

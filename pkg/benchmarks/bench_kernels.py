#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Three workloads, matching how the package actually spends time:

- pointwise sweep: the defining pair over a flat batch of chart points
  (numba: scalar loop; numpy: one broadcast call)
- fiber Newton: per-fiber root refinement across a base grid
  (numba: scalar loop; numpy: the vectorized batch Newton)
- corrector: the pseudo-arclength corrector along a curve
  (numba scalar loop vs the same loop interpreted)

Run:  python benchmarks/bench_kernels.py [--n 20000]
"""

import argparse
import time

import numpy as np
from scipy.interpolate import CubicSpline

from pillowcase import _kernels as k


def timeit(fn, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    args = ap.parse_args()
    n = args.n
    rng = np.random.default_rng(0)
    s = 0.05
    gamma = rng.uniform(0, 2 * np.pi, n)
    theta = rng.uniform(0, 2 * np.pi, n)
    nu = rng.uniform(-0.4, 0.4, n)
    tau = rng.uniform(0, 2 * np.pi, n)

    if not k.NUMBA_ENABLED:
        print("numba is disabled (PILLOWCASE_NUMBA=0 or not installed); "
              "timing the numpy path only.")

    print(f"workload sizes: n = {n}")
    print(f"{'kernel':<28}{'numba':>12}{'numpy':>12}{'speedup':>10}")

    # pointwise sweep
    def run_nb():
        out = 0.0
        for i in range(n):
            g1, g2 = k.g_scalar(k.EARRING, s, gamma[i], theta[i], nu[i], tau[i])
            out += g1 + g2
        return out

    def run_np():
        g1, g2 = k.g_pair("earring", s, gamma, theta, nu, tau)
        return float(np.sum(g1) + np.sum(g2))

    if k.NUMBA_ENABLED:
        run_nb()  # warm the JIT
    t_nb = timeit(run_nb) if k.NUMBA_ENABLED else np.nan
    t_np = timeit(run_np)
    assert abs(run_nb() - run_np()) < 1e-8 if k.NUMBA_ENABLED else True
    print(f"{'pointwise sweep':<28}{t_nb:>12.4f}{t_np:>12.4f}"
          f"{(t_np / t_nb if k.NUMBA_ENABLED else np.nan):>10.2f}")

    # fiber Newton across a grid
    m = max(256, n // 16)
    gg = rng.uniform(0.3, np.pi - 0.3, m)
    tt = rng.uniform(0.3, np.pi - 0.3, m)
    tau0 = np.arctan2(np.sin(tt), np.sin(gg))

    def newton_nb():
        out = 0.0
        for i in range(m):
            nu_i, tau_i, ok, _ = k.newton_fiber(k.EARRING, s, gg[i], tt[i],
                                                0.0, tau0[i], 1e-12, 50)
            out += nu_i
        return out

    def newton_np():
        nu_b, _, ok = k.newton_fiber_batch("earring", s, gg, tt,
                                           np.zeros(m), tau0)
        return float(np.sum(nu_b))

    if k.NUMBA_ENABLED:
        newton_nb()
    t_nb = timeit(newton_nb) if k.NUMBA_ENABLED else np.nan
    t_np = timeit(newton_np)
    print(f"{'fiber newton (' + str(m) + ')':<28}{t_nb:>12.4f}{t_np:>12.4f}"
          f"{(t_np / t_nb if k.NUMBA_ENABLED else np.nan):>10.2f}")

    # corrector along the vertical circle
    ts = np.linspace(0, 2 * np.pi, 721)
    spl_g = CubicSpline(ts, np.full_like(ts, np.pi / 2))
    spl_t = CubicSpline(ts, ts)
    breaks = np.ascontiguousarray(spl_g.x)
    cg = np.ascontiguousarray(spl_g.c)
    ct = np.ascontiguousarray(spl_t.c)
    m2 = max(200, n // 64)

    def correct(fn_cor, fn_tan):
        out = 0.0
        u = (0.3, 0.02, 0.35)
        for _ in range(m2):
            tan = fn_tan(k.EARRING, s, breaks, cg, ct, u[0], u[1], u[2])
            r = fn_cor(k.EARRING, s, breaks, cg, ct, u[0] + 1e-3 * tan[0],
                       u[1] + 1e-3 * tan[1], u[2] + 1e-3 * tan[2],
                       tan[0], tan[1], tan[2], 1e-11, 40)
            u = (r[0], r[1], r[2])
            out += r[0]
        return out

    if k.NUMBA_ENABLED:
        correct(k.corrector, k.tangent)
        t_nb = timeit(lambda: correct(k.corrector, k.tangent))
    else:
        t_nb = np.nan
    t_np = timeit(lambda: correct(k.corrector_py, k.tangent_py))
    print(f"{'corrector steps (' + str(m2) + ')':<28}{t_nb:>12.4f}{t_np:>12.4f}"
          f"{(t_np / t_nb if k.NUMBA_ENABLED else np.nan):>10.2f}")


if __name__ == "__main__":
    main()

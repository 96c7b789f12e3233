"""Parity of the compiled kernels against the pure-numpy forms."""

import numpy as np

from pillowcase import _kernels as k
from pillowcase import words as W


def test_scalar_matches_numpy_path():
    rng = np.random.default_rng(0)
    for _ in range(100):
        s = rng.uniform(-0.2, 0.2)
        g, t, tau = rng.uniform(0, 2 * np.pi, 3)
        nu = rng.uniform(-0.5, 0.5)
        for code in (k.EARRING, k.BYPASS):
            a = k.g_scalar(code, s, g, t, nu, tau)
            b = k.g_scalar_py(code, s, g, t, nu, tau)
            assert a[0] == b[0] and a[1] == b[1]


def test_kernel_matches_word_evaluation():
    rng = np.random.default_rng(1)
    for _ in range(50):
        s = rng.uniform(-0.2, 0.2)
        g, t, tau = rng.uniform(0, 2 * np.pi, 3)
        nu = rng.uniform(-0.5, 0.5)
        rep = W.embed_L(W.ChartPoint(s, g, t, nu, tau))
        g1w, g2w = W.g_of_rep(rep)
        g1, g2 = k.g_scalar(k.EARRING, s, g, t, nu, tau)
        assert abs(g1 - float(g1w)) < 1e-13
        assert abs(g2 - float(g2w)) < 1e-13
        g1w, g2w = W.gp_of_rep(rep)
        g1, g2 = k.g_scalar(k.BYPASS, s, g, t, nu, tau)
        assert abs(g1 - float(g1w)) < 1e-13
        assert abs(g2 - float(g2w)) < 1e-13


def test_batch_matches_scalar():
    rng = np.random.default_rng(2)
    n = 64
    g = rng.uniform(0, 2 * np.pi, n)
    t = rng.uniform(0, 2 * np.pi, n)
    nu = rng.uniform(-0.5, 0.5, n)
    tau = rng.uniform(0, 2 * np.pi, n)
    for variant in ("earring", "bypass"):
        code = k.variant_code(variant)
        g1, g2 = k.g_pair(variant, 0.07, g, t, nu, tau)
        for i in range(n):
            a = k.g_scalar(code, 0.07, g[i], t[i], nu[i], tau[i])
            assert g1[i] == a[0] and g2[i] == a[1]


def test_newton_fiber_batch_matches_scalar():
    rng = np.random.default_rng(3)
    n = 16
    g = rng.uniform(0.3, np.pi - 0.3, n)
    t = rng.uniform(0.3, np.pi - 0.3, n)
    tau0 = np.arctan2(np.sin(t), np.sin(g))
    nu_b, tau_b, ok_b = k.newton_fiber_batch("earring", 0.05, g, t,
                                             np.zeros(n), tau0)
    assert np.all(ok_b)
    for i in range(n):
        nu, tau, ok, _ = k.newton_fiber(k.EARRING, 0.05, g[i], t[i], 0.0,
                                        tau0[i], 1e-12, 50)
        assert ok
        assert abs(nu - nu_b[i]) < 1e-9
        assert abs(np.mod(tau - tau_b[i] + np.pi, 2 * np.pi) - np.pi) < 1e-9


def test_bypass_second_component_is_nu_exactly():
    rng = np.random.default_rng(4)
    for _ in range(50):
        nu = rng.uniform(-0.5, 0.5)
        _, g2 = k.g_scalar(k.BYPASS, rng.uniform(-0.2, 0.2),
                           rng.uniform(0, 7), rng.uniform(0, 7), nu,
                           rng.uniform(0, 7))
        assert g2 == nu


def test_ppoly_eval_matches_scipy():
    from scipy.interpolate import CubicSpline

    x = np.linspace(0, 3, 40)
    y = np.sin(2 * x) + 0.3 * x
    spl = CubicSpline(x, y)
    for xv in np.linspace(0.01, 2.99, 23):
        mine = k._ppoly_eval(spl.x, np.ascontiguousarray(spl.c), float(xv))
        assert abs(mine - float(spl(xv))) < 1e-12

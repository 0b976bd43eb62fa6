"""Cross-checks between the compiled kernels and the numpy fallback."""

import math

import numpy as np
import pytest

from braidpot import _kernels_py, _modes, backend
from braidpot.params import Truncation

from conftest import make_state

compiled = backend.get_backends().get("compiled")
needs_compiled = pytest.mark.skipif(compiled is None,
                                    reason="compiled extension not built")


@needs_compiled
def test_bessel_tables_agree():
    xs = np.concatenate([np.linspace(1e-3, 0.5, 7), np.linspace(0.6, 40.0, 23)])
    for nmax in (3, 17):
        assert np.allclose(compiled.i_orders(xs, nmax), _kernels_py.i_orders(xs, nmax),
                           rtol=1e-13, atol=1e-300)
        assert np.allclose(compiled.k_orders(xs, nmax), _kernels_py.k_orders(xs, nmax),
                           rtol=1e-13)
        assert np.allclose(compiled.j_orders(xs, nmax), _kernels_py.j_orders(xs, nmax),
                           rtol=1e-12, atol=1e-300)
        assert np.allclose(compiled.i_orders_scaled(xs, nmax),
                           _kernels_py.i_orders_scaled(xs, nmax), rtol=1e-13)
        assert np.allclose(compiled.k_orders_scaled(xs, nmax),
                           _kernels_py.k_orders_scaled(xs, nmax), rtol=1e-13)


@needs_compiled
def test_reductions_agree():
    g = _modes.local_geometry(make_state(eta=0.35, omega_A3=0.02,
                                         xi1=0.4, xi2=-0.1, dxi1=1.1, dxi2=0.9))
    trunc = Truncation(n_max=4, m_max=3, j_max=3, l_max=3)
    ncap, mcap, jcap = trunc.n_max, trunc.m_max, trunc.j_max
    P = 2 * mcap + ncap + jcap
    u = np.arange(-2 * ncap, 2 * ncap + 1)[:, None, None]
    p = np.arange(-P, P + 1)[None, :, None]
    q = np.arange(-P, P + 1)[None, None, :]
    kgrid = -u * (g.omega_a1 / 2.0) - p * (g.dxi1 / 2.0) + q * (g.dxi2 / 2.0)
    kuniq, kidx = _modes._unique_k(kgrid)
    tabs = _modes._fill_ik_tables(g, kuniq, 1.0, ncap, mcap, jcap)
    args = (ncap, mcap, jcap, kidx, tabs["I1m"], tabs["I1p"], tabs["I2m"],
            tabs["I2p"], tabs["KT"], tabs["J1T"], tabs["J2T"])
    C1, b1 = compiled.nocore_reduce(*args)
    C2, b2 = _kernels_py.nocore_reduce(*args)
    assert np.max(np.abs(C1 - C2)) < 1e-14 * max(1.0, np.max(np.abs(C1)))
    assert b1 == pytest.approx(b2, rel=1e-12)


@needs_compiled
def test_dir_reduce_agrees():
    from braidpot import response

    g = _modes.local_geometry(make_state(eta=0.3, xi1=0.4, xi2=-0.1,
                                         dxi1=1.2, dxi2=0.8))
    ncap, mcap, lcap = 4, 3, 3
    jord = 2 * mcap + ncap + lcap
    l = np.arange(-lcap, lcap + 1)[:, None, None]
    lp = np.arange(-lcap, lcap + 1)[None, :, None]
    u = np.arange(-2 * ncap, 2 * ncap + 1)[None, None, :]
    kgrid = -u * (g.omega_a1 / 2.0) - l * (g.dxi1 / 2.0) + lp * (g.dxi2 / 2.0)
    kuniq, kidx = _modes._unique_k(kgrid)
    tabs = _modes._fill_ik_tables(g, kuniq, 1.0, ncap, mcap, jord)
    Z1, Z1p = response.zeta0_tables(lcap, kuniq * math.cos(g.eta1), g.a, 1.0)
    Z2, Z2p = response.zeta0_tables(lcap, kuniq * math.cos(g.eta2), g.a, 1.0)
    args = (ncap, mcap, lcap, -1, kidx, tabs["I1m"], tabs["I1p"], tabs["I2m"],
            tabs["I2p"], tabs["KT"], tabs["J1T"], tabs["J2T"], Z1, Z1p, Z2, Z2p)
    out1 = compiled.dir_reduce(*args)
    out2 = _kernels_py.dir_reduce(*args)
    for a, b in zip(out1[:3], out2[:3]):
        assert np.max(np.abs(a - b)) < 1e-13 * max(1.0, np.max(np.abs(a)))


@needs_compiled
def test_yukawa_agrees():
    rng = np.random.default_rng(3)
    pts1 = rng.uniform(-5, 5, (300, 3))
    pts2 = rng.uniform(-5, 5, (300, 3)) + np.array([8.0, 0.0, 0.0])
    w1 = rng.uniform(0.5, 1.5, 300)
    w2 = rng.uniform(0.5, 1.5, 300)
    a = compiled.yukawa_sum(pts1, w1, pts2, w2, 1.0, 30.0)
    b = _kernels_py.yukawa_sum(pts1, w1, pts2, w2, 1.0, 30.0)
    assert a == pytest.approx(b, rel=1e-13)


def test_backend_env_override(monkeypatch):
    import importlib

    import braidpot.backend as bk

    monkeypatch.setenv("BRAIDPOT_BACKEND", "python")
    importlib.reload(bk)
    assert bk.name == "python"
    monkeypatch.delenv("BRAIDPOT_BACKEND")
    importlib.reload(bk)

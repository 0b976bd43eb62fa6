"""Benchmark the compiled kernels against the pure-python fallback.

Run as `python -m braidpot.bench`.  Times the Bessel table fills, the two
hot mode-sum reductions and the Yukawa pair sum on representative inputs,
and checks that the two implementations agree.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import _modes, backend
from .geometry import BraidState
from .params import Truncation


def _time(fn, repeat=3):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run():
    impls = backend.get_backends()
    if "compiled" not in impls:
        print("compiled backend not available; showing python fallback only")
    st = BraidState.make(R=3.0, a=1.0, eta=0.35, xi1=0.4, xi2=-0.1,
                         dxi1_ds=1.1, dxi2_ds=0.9)
    g = _modes.local_geometry(st)
    trunc = Truncation()
    kappa_d = 1.0

    ncap, mcap, jcap = trunc.n_max, trunc.m_max, trunc.j_max
    P = 2 * mcap + ncap + jcap
    u = np.arange(-2 * ncap, 2 * ncap + 1)[:, None, None]
    p = np.arange(-P, P + 1)[None, :, None]
    q = np.arange(-P, P + 1)[None, None, :]
    kgrid = -u * (g.omega_a1 / 2.0) - p * (g.dxi1 / 2.0) + q * (g.dxi2 / 2.0)
    kuniq, kidx = _modes._unique_k(kgrid)
    xs = np.hypot(kuniq, kappa_d)

    results = {}
    for name, impl in impls.items():
        row = {}
        row["bessel I fill"], _ = _time(lambda: impl.i_orders(g.a * xs, ncap + mcap))
        row["bessel K fill"], _ = _time(lambda: impl.k_orders(g.R * xs, 2 * ncap))
        row["bessel J fill"], _ = _time(lambda: impl.j_orders(g.a * kuniq, jcap))
        tabs = _modes._fill_ik_tables(g, kuniq, kappa_d, ncap, mcap, jcap)
        row["no-core reduce"], out = _time(lambda: impl.nocore_reduce(
            ncap, mcap, jcap, kidx,
            tabs["I1m"], tabs["I1p"], tabs["I2m"], tabs["I2p"],
            tabs["KT"], tabs["J1T"], tabs["J2T"]))
        row["_nocore_C"] = out[0]

        npts = 2500
        s = np.linspace(-12.0, 12.0, npts)
        pts1 = np.stack([np.cos(s), np.sin(s), s], axis=1)
        pts2 = np.stack([2.5 + np.cos(s), np.sin(s), s], axis=1)
        w = np.full(npts, 12.0 / npts)
        row["yukawa pair sum"], out = _time(
            lambda: impl.yukawa_sum(pts1, w, pts2, w, 1.0, 40.0), repeat=1)
        row["_yukawa"] = out
        results[name] = row

    names = [k for k in next(iter(results.values())) if not k.startswith("_")]
    print(f"{'kernel':<18}" + "".join(f"{n:>14}" for n in results) +
          ("" if len(results) < 2 else f"{'speedup':>10}"))
    for key in names:
        line = f"{key:<18}"
        times = []
        for impl_name in results:
            t = results[impl_name][key]
            times.append(t)
            line += f"{t * 1e3:>11.2f} ms"
        if len(times) == 2 and times[list(results).index('compiled')] > 0:
            py = results["python"][key]
            cp = results["compiled"][key]
            line += f"{py / cp:>9.1f}x"
        print(line)
    if len(results) == 2:
        dc = np.max(np.abs(results["python"]["_nocore_C"] - results["compiled"]["_nocore_C"]))
        dy = abs(results["python"]["_yukawa"] - results["compiled"]["_yukawa"])
        print(f"cross-backend agreement: no-core {dc:.3e}, yukawa {dy:.3e}")


if __name__ == "__main__":
    run()

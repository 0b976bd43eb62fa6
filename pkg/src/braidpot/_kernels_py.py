"""Pure-python backend: numpy implementations of the hot kernels.

Mirrors the contract of the compiled module (_ckernels).  The reductions
evaluate the same sums as the compiled literal loops, regrouped into
vectorised gather/products; accumulation order is fixed, so results are
reproducible run to run.
"""

from __future__ import annotations

import numpy as np

from ._bessel_py import (BACKEND_NAME, i_orders, i_orders_scaled, j_orders,
                         k_orders, k_orders_scaled, yukawa_sum)

__all__ = [
    "i_orders",
    "i_orders_scaled",
    "j_orders",
    "k_orders",
    "k_orders_scaled",
    "yukawa_sum",
    "nocore_reduce",
    "dir_reduce",
    "BACKEND_NAME",
]


def _j_signed(JT, qi, order):
    """J_order at the table's (signed) argument; order may be negative."""
    a = np.abs(order)
    v = JT[qi, a]
    return np.where((order < 0) & (a % 2 == 1), -v, v)


def nocore_reduce(ncap, mcap, jcap, kidx, I1m, I1p, I2m, I2p, KT, J1T, J2T):
    """No-core six-index reduction; see the compiled twin for semantics."""
    P = 2 * mcap + ncap + jcap
    nsz = 2 * P + 1
    C = np.zeros(nsz * nsz)
    bound = 0.0
    n_range = np.arange(-ncap, ncap + 1)
    m = np.arange(-mcap, mcap + 1)[:, None, None, None]
    mp = np.arange(-mcap, mcap + 1)[None, :, None, None]
    j = np.arange(-jcap, jcap + 1)[None, None, :, None]
    jp = np.arange(-jcap, jcap + 1)[None, None, None, :]
    for n in n_range:
        for np_ in n_range:
            u = n + np_
            ko = abs(np_ - n)
            p = 2 * m - n - j
            q = np_ - 2 * mp - jp
            qi = kidx[u + 2 * ncap, p + P, q + P]
            term = (
                KT[qi, ko]
                * I1m[qi, np.abs(n - m)]
                * I1p[qi, np.abs(m)]
                * I2m[qi, np.abs(np_ - mp)]
                * I2p[qi, np.abs(mp)]
                * _j_signed(J1T, qi, j)
                * _j_signed(J2T, qi, jp)
            )
            if np_ % 2:
                term = -term
            shape = np.broadcast_shapes(p.shape, q.shape, term.shape)
            flat = np.broadcast_to((p + P) * nsz + (q + P), shape).ravel()
            C += np.bincount(flat, weights=np.broadcast_to(term, shape).ravel(),
                             minlength=nsz * nsz)
            atcap = (
                (abs(n) == ncap)
                | (abs(np_) == ncap)
                | (np.abs(m) == mcap)
                | (np.abs(mp) == mcap)
                | (np.abs(j) == jcap)
                | (np.abs(jp) == jcap)
            )
            bound += float(np.abs(np.where(atcap, term, 0.0)).sum())
    return C.reshape(nsz, nsz), bound


def dir_reduce(ncap, mcap, lcap, jwin, kidx, I1m, I1p, I2m, I2p, KT, J1T, J2T,
               Z1, Z1p, Z2, Z2p):
    """Direct-term six-index reduction; see the compiled twin for semantics."""
    lsz = 2 * lcap + 1
    C0 = np.zeros((lsz, lsz))
    C1 = np.zeros((lsz, lsz))
    C2 = np.zeros((lsz, lsz))
    bound = 0.0
    n = np.arange(-ncap, ncap + 1)[:, None, None, None]
    np_ = np.arange(-ncap, ncap + 1)[None, :, None, None]
    m = np.arange(-mcap, mcap + 1)[None, None, :, None]
    mp = np.arange(-mcap, mcap + 1)[None, None, None, :]
    u = (n + np_)[:, :, 0, 0]
    ko = np.abs(np_ - n)[:, :, 0, 0]
    sgn = np.where(np_[:, :, 0, 0] % 2 == 0, 1.0, -1.0)
    nmn = (n - np_).astype(float)
    for l in range(-lcap, lcap + 1):
        il = l + lcap
        j1o = 2 * m - n - l
        for lp in range(-lcap, lcap + 1):
            ilp = lp + lcap
            qi2 = kidx[il, ilp, u + 2 * ncap]
            qi = qi2[:, :, None, None]
            j2o = np_ - 2 * mp - lp
            base = (
                KT[qi2, ko][:, :, None, None]
                * I1m[qi, np.abs(n - m)]
                * I1p[qi, np.abs(m)]
                * I2m[qi, np.abs(np_ - mp)]
                * I2p[qi, np.abs(mp)]
                * _j_signed(J1T, qi, j1o)
                * _j_signed(J2T, qi, j2o)
                * sgn[:, :, None, None]
            )
            if jwin >= 0:
                base = np.where((np.abs(j1o) <= jwin) & (np.abs(j2o) <= jwin), base, 0.0)
            z11 = Z1[qi2, abs(l)][:, :, None, None]
            z1p1 = Z1p[qi2, abs(l)][:, :, None, None]
            z22 = Z2[qi2, abs(lp)][:, :, None, None]
            z2p2 = Z2p[qi2, abs(lp)][:, :, None, None]
            t0 = base * z11 * z22
            C0[il, ilp] = t0.sum()
            C1[il, ilp] = (base * nmn * z1p1 * z22).sum()
            C2[il, ilp] = (base * nmn * z11 * z2p2).sum()
            atcap = (
                (np.abs(n) == ncap)
                | (np.abs(np_) == ncap)
                | (np.abs(m) == mcap)
                | (np.abs(mp) == mcap)
                | (abs(l) == lcap)
                | (abs(lp) == lcap)
            )
            bound += float(np.abs(np.where(atcap, t0, 0.0)).sum())
    return C0, C1, C2, bound

"""Pure-python (numpy) Bessel primitives.

Order-table evaluators for J_n, I_n, K_n used by the mode-sum kernels.
All three return every order 0..nmax at once, which is what the energy
sums consume.  I and J use Miller's downward recurrence with sum
normalisation; K_0/K_1 use the ascending series for x <= 2 and a
Steed/Lentz continued fraction beyond, with stable upward recurrence in
the order.  Accuracy is ~1e-13 relative over the supported domain
(|n| <= 64, 1e-3 <= x <= 300 for I/K, |x| <= 150 for J).
"""

from __future__ import annotations

import numpy as np

EULER_GAMMA = 0.5772156649015329

_RESCALE_THRESHOLD = 1e250
_RESCALE_EVERY = 8

BACKEND_NAME = "python"


def _series_small(x, nmax, coef_sign):
    """Ascending series for I (coef_sign=+1) / J (-1), accurate for x <= 0.5."""
    half = x / 2.0
    q = coef_sign * half * half
    out = np.zeros((x.size, nmax + 1))
    lead = np.ones_like(x)
    for n in range(nmax + 1):
        term = lead.copy()
        s = term.copy()
        for k in range(1, 12):
            term = term * q / (k * (n + k))
            s += term
        out[:, n] = s
        lead = lead * half / (n + 1)
    return out


def _down_recurrence(x, nmax, coef_sign, norm_kind):
    """Shared Miller downward recurrence for I (coef_sign=+1) and J (-1).

    norm_kind selects the normalisation sum: 'exp' uses
    I_0 + 2*sum I_k = e^x, 'unit' uses J_0 + 2*sum J_2k = 1.  Arguments
    below 0.5 take the ascending series instead (the recurrence growth
    rate there would outrun the overflow rescaling).
    """
    scaled = norm_kind == "exp_scaled"
    x = np.atleast_1d(np.asarray(x, dtype=float))
    npts = x.size
    out = np.zeros((npts, nmax + 1))
    out[:, 0] = 1.0
    small = (x > 0.0) & (x <= 0.5)
    if small.any():
        series = _series_small(x[small], nmax, coef_sign)
        if scaled:
            series = series * np.exp(-x[small])[:, None]
        out[small] = series
    pos = x > 0.5
    if not pos.any():
        return out
    xp = x[pos]
    xmax = float(xp.max())
    if not scaled and xmax > 690.0:
        raise OverflowError(f"Bessel argument {xmax:g} beyond supported range")
    mstart = nmax + 16 + int(np.ceil(1.25 * xmax + 2.0 * np.sqrt(40.0 * (nmax + 2))))
    if mstart % 2:
        mstart += 1

    res = np.zeros((xp.size, nmax + 1))
    hi = np.zeros_like(xp)          # working value at order k+1
    lo = np.full_like(xp, 1e-30)    # working value at order k
    exp_norm = norm_kind in ("exp", "exp_scaled")
    norm = np.zeros_like(xp)
    if exp_norm:
        norm = norm + 2.0 * lo if mstart > 0 else lo.copy()
    else:
        norm = norm + (2.0 * lo if mstart % 2 == 0 and mstart > 0 else 0.0)
    for k in range(mstart, 0, -1):
        nxt = coef_sign * hi + (2.0 * k / xp) * lo
        hi, lo = lo, nxt
        kk = k - 1
        if kk <= nmax:
            res[:, kk] = lo
        if exp_norm:
            norm += lo if kk == 0 else 2.0 * lo
        elif kk % 2 == 0:
            norm += lo if kk == 0 else 2.0 * lo
        if (k % _RESCALE_EVERY) == 0:
            big = np.abs(lo) > _RESCALE_THRESHOLD
            if big.any():
                fac = np.where(big, 1.0 / _RESCALE_THRESHOLD, 1.0)
                hi *= fac
                lo *= fac
                norm *= fac
                res *= fac[:, None]
    if norm_kind == "exp":
        res *= (np.exp(xp) / norm)[:, None]
    else:
        # 'exp_scaled' normalises by e^x implicitly: res/norm = e^{-x} I_n
        res /= norm[:, None]
    out[pos] = res
    return out


def i_orders(x, nmax):
    """I_0(x)..I_nmax(x) for x >= 0 (scalar or 1-D array)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("i_orders expects x >= 0; use order parity for x < 0")
    res = _down_recurrence(x, nmax, +1.0, "exp")
    return res[0] if x.ndim == 0 else res


def i_orders_scaled(x, nmax):
    """e^{-x} I_n(x) for orders 0..nmax; safe for arbitrarily large x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("i_orders_scaled expects x >= 0")
    res = _down_recurrence(x, nmax, +1.0, "exp_scaled")
    return res[0] if x.ndim == 0 else res


def j_orders(x, nmax):
    """J_0(x)..J_nmax(x) for real x (negative handled via parity)."""
    x = np.asarray(x, dtype=float)
    res = _down_recurrence(np.abs(x), nmax, -1.0, "unit")
    neg = np.atleast_1d(x) < 0.0
    if neg.any():
        sign = np.ones(nmax + 1)
        sign[1::2] = -1.0
        res[neg] *= sign
    return res[0] if x.ndim == 0 else res


def _k0k1_series(x):
    """K_0, K_1 via ascending series (intended for x <= 2)."""
    q = x * x / 4.0
    # I_0, I_1 ascending series
    term = np.ones_like(x)
    i0 = term.copy()
    i1 = np.full_like(x, 0.5)
    term1 = np.full_like(x, 0.5)
    # K_0 sum: sum_k q^k H_k / (k!)^2 ;  K_1 sum: sum_k (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    hk = 0.0
    s0 = np.zeros_like(x)
    psi1 = -EULER_GAMMA
    psi2 = 1.0 - EULER_GAMMA
    s1 = np.full_like(x, psi1 + psi2)
    t1 = np.ones_like(x)
    for k in range(1, 30):
        term = term * q / (k * k)
        i0 = i0 + term
        term1 = term1 * q / (k * (k + 1))
        i1 = i1 + term1
        hk += 1.0 / k
        s0 = s0 + term * hk
        t1 = t1 * q / (k * (k + 1))
        psi1 += 1.0 / k
        psi2 += 1.0 / (k + 1)
        s1 = s1 + t1 * (psi1 + psi2)
    i1 = i1 * x
    lg = np.log(x / 2.0)
    k0 = -(lg + EULER_GAMMA) * i0 + s0
    k1 = lg * i1 + 1.0 / x - (x / 4.0) * s1
    return k0, k1


def _k0k1_cf(x, scaled=False):
    """K_0, K_1 by the Steed/Lentz continued fraction (x >= 2)."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 64):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < 1e-17 * np.abs(s)):
            break
    k0 = np.sqrt(np.pi / (2.0 * x)) / s
    if not scaled:
        k0 = k0 * np.exp(-x)
    k1 = k0 * (x + 0.5 - a1 * h) / x
    return k0, k1


def _k_orders_impl(x, nmax, scaled):
    x = np.asarray(x, dtype=float)
    xs = np.atleast_1d(x).astype(float)
    if np.any(xs <= 0.0):
        raise ValueError("k_orders requires x > 0")
    out = np.empty((xs.size, nmax + 1))
    k0 = np.empty_like(xs)
    k1 = np.empty_like(xs)
    lo = xs <= 2.0
    if lo.any():
        k0[lo], k1[lo] = _k0k1_series(xs[lo])
        if scaled:
            k0[lo] *= np.exp(xs[lo])
            k1[lo] *= np.exp(xs[lo])
    if (~lo).any():
        k0[~lo], k1[~lo] = _k0k1_cf(xs[~lo], scaled)
    out[:, 0] = k0
    if nmax >= 1:
        out[:, 1] = k1
    for n in range(1, nmax):
        out[:, n + 1] = out[:, n - 1] + (2.0 * n / xs) * out[:, n]
    if not np.isfinite(out).all():
        raise OverflowError("K_n overflow: order/argument outside supported range")
    return out[0] if x.ndim == 0 else out


def k_orders(x, nmax):
    """K_0(x)..K_nmax(x) for x > 0 (scalar or 1-D array)."""
    return _k_orders_impl(x, nmax, scaled=False)


def k_orders_scaled(x, nmax):
    """e^{x} K_n(x) for orders 0..nmax; safe for arbitrarily large x."""
    return _k_orders_impl(x, nmax, scaled=True)


def yukawa_sum(pts1, w1, pts2, w2, kappa, rcut):
    """Sum_ij w1_i w2_j exp(-kappa r_ij)/r_ij, skipping r > rcut.

    Raises on near-contact pairs (r < 1e-9).
    """
    total = 0.0
    block = 512
    n1 = pts1.shape[0]
    for i0 in range(0, n1, block):
        blk = pts1[i0 : i0 + block]
        wb = w1[i0 : i0 + block]
        d = np.sqrt(((blk[:, None, :] - pts2[None, :, :]) ** 2).sum(axis=2))
        if (d < 1e-9).any():
            raise ValueError("overlapping charges in pair sum")
        ker = np.where(d <= rcut, np.exp(-kappa * d) / d, 0.0)
        total += float(np.einsum("i,ij,j->", wb, ker, w2))
    return total

"""Image-charge surface response of the low-dielectric rod cores.

Leading order: the own-rod reflection factor zeta_img0 / zeta_surf0 and its
axial-wavenumber derivative (analytic; finite differences kept as a test
oracle).  Next order: the cross-rod coefficients zeta_surf1 for either rod,
their small-tilt forms, and vectorised tables consumed by the energy sums.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .bessel import SeriesTolerance


class ConvergenceError(RuntimeError):
    """A truncated series failed to reach the requested tolerance."""


@dataclass(frozen=True)
class ResponseParams:
    a: float
    R: float
    kappa_D: float
    eta: float
    trunc: SeriesTolerance = field(default_factory=SeriesTolerance)
    l_max: int = 8
    # the ring tail decays like (a/R)^ring, so reaching abs_tol = 1e-12
    # needs generous caps; single-point sums stay cheap regardless
    np_max: int = 40
    mp_max: int = 40

    def __post_init__(self):
        if self.a <= 0.0 or self.R <= 0.0 or self.kappa_D <= 0.0:
            raise ValueError("a, R and kappa_D must be positive")
        if self.a >= self.R / 2.0:
            raise ValueError("image expansion requires a < R/2")
        krd = self.kappa_D * self.R
        if krd <= 1.0:
            raise ValueError(f"image expansion invalid for kappa_D R = {krd:g} <= 1")
        if krd < 2.0:
            warnings.warn(
                f"kappa_D R = {krd:g} is marginal for the image expansion",
                stacklevel=2,
            )


def _ik_pair(n, x, scaled=True):
    """(I_n, I_n', K_n, K_n') at x, exponentially scaled by default.

    The scaled form (e^{-x} I, e^{x} K) is exact wherever only ratios or
    I*K products appear, and stays finite for arbitrarily large axial
    wavenumbers; pass scaled=False where a bare I'/(K' I) ratio is needed.
    """
    n = abs(int(n))
    fetch_i = backend.i_orders_scaled if scaled else backend.i_orders
    fetch_k = backend.k_orders_scaled if scaled else backend.k_orders
    it = fetch_i(x, n + 1)
    kt = fetch_k(x, n + 1)
    ilow = it[..., abs(n - 1)]
    klow = kt[..., abs(n - 1)]
    return (
        it[..., n],
        0.5 * (ilow + it[..., n + 1]),
        kt[..., n],
        -0.5 * (klow + kt[..., n + 1]),
    )


def zeta_img0(n, k_z, a, kappa_D):
    """Leading-order image reflection factor of a single rod mode."""
    x = a * np.hypot(k_z, kappa_D)
    i, ip, k, kp = _ik_pair(n, x)
    return -k * ip / (i * kp)


def zeta_surf0(n, k_z, a, kappa_D):
    """1 + zeta_img0, reduced with the Wronskian to -1/(x I_n K_n')."""
    x = a * np.hypot(k_z, kappa_D)
    i, _, _, kp = _ik_pair(n, x)
    return -1.0 / (x * i * kp)


def zeta_surf0_prime(n, k_z, a, kappa_D):
    """Analytic d/dk_z of zeta_surf0 (odd in k_z)."""
    n = abs(int(n))
    k_z = np.asarray(k_z, dtype=float)
    x = a * np.hypot(k_z, kappa_D)
    i, ip, k, kp = _ik_pair(n, x)
    kpp = (1.0 + n * n / (x * x)) * k - kp / x
    zeta = -1.0 / (x * i * kp)
    dlog = 1.0 / x + ip / i + kpp / kp
    return -zeta * dlog * (a * a * k_z / x)


def zeta_surf0_prime_fd(n, k_z, a, kappa_D, h=1e-6):
    """Centered finite-difference oracle for zeta_surf0_prime."""
    return (
        zeta_surf0(n, k_z + h, a, kappa_D) - zeta_surf0(n, k_z - h, a, kappa_D)
    ) / (2.0 * h)


def surf0_slope_diagnostic(a_kappa, lmax=3, grid=None):
    """max |d zeta_surf0/d(a k_z)| over a k_z grid, per order.

    Large values flag that the linearised treatment of the response inside
    the angular convolution is losing accuracy.
    """
    if grid is None:
        grid = np.linspace(-10.0, 10.0, 401)
    out = {}
    for l in range(lmax + 1):
        sl = zeta_surf0_prime(l, grid, 1.0, a_kappa)
        out[l] = float(np.max(np.abs(sl)))
    return out


def fig1_table(a_kappa, lmax=3, akz=None):
    """Rows (l, a k_z, zeta_surf0) of the leading response curves."""
    if akz is None:
        akz = np.linspace(-10.0, 10.0, 201)
    rows = []
    for l in range(lmax + 1):
        vals = zeta_surf0(l, akz, 1.0, a_kappa)
        rows.extend((l, float(k), float(v)) for k, v in zip(akz, vals))
    return rows


# ---------------------------------------------------------------------------
# next-to-leading coefficients (single point, ring-truncated)
# ---------------------------------------------------------------------------

_surf1_cache: dict = {}
_surf1_lock = threading.Lock()


def _surf1_term(rod, n, l, k_z, p: ResponseParams, npr, mp):
    # backend tables directly: internal orders may exceed the public cap
    a, R, kap, eta = p.a, p.R, p.kappa_D, p.eta
    x = a * math.hypot(k_z, kap)
    X = R * math.hypot(k_z, kap)
    w = a * k_z * math.sin(eta)
    xm = x * (1.0 - math.cos(eta)) / 2.0
    xp = x * (1.0 + math.cos(eta)) / 2.0

    def jval(order, arg):
        tab = backend.j_orders(arg, abs(order))
        v = tab[abs(order)]
        return -v if (order < 0 and order % 2) else v

    ii = (backend.i_orders(xm, abs(npr - mp))[abs(npr - mp)]
          * backend.i_orders(xp, abs(mp))[abs(mp)])
    kk = backend.k_orders(X, abs(npr - n))[abs(npr - n)]
    if rod == 2:
        val = ii * kk * jval(2 * mp - npr - l, w)
        sgn = (-1.0) ** n
    else:
        val = ii * kk * jval(npr + l - 2 * mp, w)
        sgn = (-1.0) ** npr
    return sgn * val, sgn * val * (n - npr)


def zeta_surf1(rod, n, l, k_z, params: ResponseParams):
    """Next-order image coefficients (zeta10, zeta11) for rod 1 or 2.

    The (n', m') sum expands over square rings until a full ring adds less
    than abs_tol relative to the running sums.  zeta11 carries the
    wavenumber slope of the leading response (it descends from linearising
    that response inside the angular convolution).
    """
    if rod not in (1, 2):
        raise ValueError("rod must be 1 or 2")
    key = (rod, n, l, round(k_z, 12), params.a, params.R, params.kappa_D,
           params.eta, params.np_max, params.mp_max, params.trunc.abs_tol)
    hit = _surf1_cache.get(key)
    if hit is not None:
        return hit
    x = params.a * math.hypot(k_z, params.kappa_D)
    i, ip, _, kp = _ik_pair(n, x, scaled=False)
    pref = -ip / (kp * i)
    zs0 = zeta_surf0(l, k_z * math.cos(params.eta), params.a, params.kappa_D)
    zs0p = zeta_surf0_prime(l, k_z * math.cos(params.eta), params.a, params.kappa_D)

    s0 = s1 = 0.0
    rmax = max(params.np_max, params.mp_max)
    quiet = 0
    for ring in range(rmax + 1):
        ring0 = ring1 = 0.0
        for npr in range(-min(ring, params.np_max), min(ring, params.np_max) + 1):
            for mp in range(-min(ring, params.mp_max), min(ring, params.mp_max) + 1):
                if max(abs(npr), abs(mp)) != ring:
                    continue
                t0, t1 = _surf1_term(rod, n, l, k_z, params, npr, mp)
                ring0 += t0
                ring1 += t1
        s0 += ring0
        s1 += ring1
        scale = max(abs(s0), abs(s1), 1e-30)
        # two consecutive quiet rings guard against accidental cancellation
        if ring > abs(l) and max(abs(ring0), abs(ring1)) < params.trunc.abs_tol * scale:
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError("zeta_surf1 ring sum did not converge at the order caps")
    z10 = pref * s0 * zs0
    z11 = -pref * (s1 / params.R) * zs0p
    with _surf1_lock:
        _surf1_cache.setdefault(key, (z10, z11))
    return z10, z11


def zeta_surf1_small_angle(rod, n, l, k_z, params: ResponseParams):
    """Small-tilt forms: (zeta100, zeta101 [O(sin eta) slope], zeta11)."""
    if rod not in (1, 2):
        raise ValueError("rod must be 1 or 2")
    a, R, kap, eta = params.a, params.R, params.kappa_D, params.eta
    x = a * math.hypot(k_z, kap)
    X = R * math.hypot(k_z, kap)
    i, ip, _, kp = _ik_pair(n, x, scaled=False)
    pref = -ip / (kp * i)
    zs0 = zeta_surf0(l, k_z * math.cos(eta), a, kap)
    zs0p = zeta_surf0_prime(l, k_z * math.cos(eta), a, kap)
    from .bessel import bessel_i, bessel_k

    il = bessel_i(abs(l), x)
    knl = bessel_k(n - l, X)
    sgn = (-1.0) ** n if rod == 2 else (-1.0) ** l
    z100 = pref * sgn * il * knl * zs0
    z101 = pref * sgn * (a * k_z / 2.0) * (
        bessel_i(abs(l + 1), x) * bessel_k(n - l - 1, X)
        - bessel_i(abs(l - 1), x) * bessel_k(n - l + 1, X)
    ) * zs0
    z11 = -pref * sgn * (n - l) * il * knl * zs0p / R
    return z100, z101, z11


# ---------------------------------------------------------------------------
# vectorised tables for the energy kernels
# ---------------------------------------------------------------------------


def _gather(tab, orders):
    """tab[:, |orders|] over a signed order array (orders broadcastable)."""
    return tab[:, np.abs(orders)]


def _j_gather(tab, orders):
    """Signed-order gather honouring J_{-m}(x) = (-1)^m J_m(x)."""
    a = np.abs(orders)
    v = tab[:, a]
    flip = (orders < 0) & (a % 2 == 1)
    return np.where(flip, -v, v)


def zeta0_tables(lmax, q, a, kappa_D):
    """zeta_surf0 and its q-derivative for orders 0..lmax over q (signed)."""
    q = np.asarray(q, dtype=float)
    x = a * np.hypot(q, kappa_D)
    # scaled tables: the e^{+-x} factors cancel inside the x I K' products
    it = backend.i_orders_scaled(x, lmax + 1)
    kt = backend.k_orders_scaled(x, lmax + 1)
    Z = np.empty((q.size, lmax + 1))
    Zp = np.empty_like(Z)
    for l in range(lmax + 1):
        i = it[:, l]
        ipr = 0.5 * (it[:, abs(l - 1)] + it[:, l + 1])
        k = kt[:, l]
        kpr = -0.5 * (kt[:, abs(l - 1)] + kt[:, l + 1])
        kpp = (1.0 + l * l / (x * x)) * k - kpr / x
        zeta = -1.0 / (x * i * kpr)
        Z[:, l] = zeta
        Zp[:, l] = -zeta * (1.0 / x + ipr / i + kpp / kpr) * (a * a * q / x)
    return Z, Zp


def build_surf1_tables(rod, kz, a, R, kappa_D, eta, lmax, np_max, mp_max,
                       want_derivative=True):
    """zeta_surf1 coefficient tables over a k_z grid.

    Returns Z0, Z0p, Z1 with shape (len(kz), 2*lmax+1, 2*lmax+1); the middle
    axis is the image azimuthal order n, the last the driving order l (both
    offset by lmax).  Z0p is the analytic k_z derivative of Z0.
    """
    kz = np.asarray(kz, dtype=float)
    nk = kz.size
    ce, se = math.cos(eta), math.sin(eta)
    x = a * np.hypot(kz, kappa_D)
    X = R * np.hypot(kz, kappa_D)
    w = a * kz * se
    xm = x * (1.0 - ce) / 2.0
    xp = x * (1.0 + ce) / 2.0
    dx = a * a * kz / x
    dX = R * R * kz / X
    dxm = dx * (1.0 - ce) / 2.0
    dxp = dx * (1.0 + ce) / 2.0
    dw = a * se

    npo = np_max + mp_max + 1
    Ixm = backend.i_orders(xm, npo)
    Ixp = backend.i_orders(xp, mp_max + 1)
    KX = backend.k_orders(X, np_max + lmax + 1)
    jord = np_max + 2 * mp_max + lmax + 1
    Jw = backend.j_orders(w, jord + 1)
    Ix = backend.i_orders(x, lmax + 2)
    Kx = backend.k_orders(x, lmax + 2)
    Z0q, Z0qp = zeta0_tables(lmax, kz * ce, a, kappa_D)

    npr = np.arange(-np_max, np_max + 1)
    mp = np.arange(-mp_max, mp_max + 1)
    NPR = npr[:, None]
    MP = mp[None, :]

    # (n', m') independent pieces
    A = _gather(Ixm, np.abs(NPR - MP)) * _gather(Ixp, np.abs(MP))
    if want_derivative:
        iprm = 0.5 * (_gather(Ixm, np.abs(np.abs(NPR - MP) - 1))
                      + _gather(Ixm, np.abs(NPR - MP) + 1))
        iprp = 0.5 * (_gather(Ixp, np.abs(np.abs(MP) - 1)) + _gather(Ixp, np.abs(MP) + 1))
        dA = (iprm * dxm[:, None, None] * _gather(Ixp, np.abs(MP))
              + _gather(Ixm, np.abs(NPR - MP)) * iprp * dxp[:, None, None])

    lsz = 2 * lmax + 1
    Z0 = np.empty((nk, lsz, lsz))
    Z0p = np.zeros_like(Z0)
    Z1 = np.empty_like(Z0)

    for n in range(-lmax, lmax + 1):
        i_n = Ix[:, abs(n)]
        ip_n = 0.5 * (Ix[:, abs(abs(n) - 1)] + Ix[:, abs(n) + 1])
        k_n = Kx[:, abs(n)]
        kp_n = -0.5 * (Kx[:, abs(abs(n) - 1)] + Kx[:, abs(n) + 1])
        pref = -ip_n / (kp_n * i_n)
        if want_derivative:
            ipp_n = (1.0 + n * n / (x * x)) * i_n - ip_n / x
            kpp_n = (1.0 + n * n / (x * x)) * k_n - kp_n / x
            dpref = pref * (ipp_n / ip_n - kpp_n / kp_n - ip_n / i_n) * dx
        kord = np.abs(n - NPR) if rod == 2 else np.abs(NPR - n)
        KB = _gather(KX, kord)
        kprB = -0.5 * (_gather(KX, np.abs(kord - 1)) + _gather(KX, kord + 1))
        for l in range(-lmax, lmax + 1):
            jord_nl = (2 * MP - NPR - l) if rod == 2 else (NPR + l - 2 * MP)
            JB = _j_gather(Jw, jord_nl)
            if rod == 2:
                sgn = (-1.0) ** n
                wgt = np.ones_like(NPR, dtype=float)
            else:
                sgn = 1.0
                wgt = np.where(NPR % 2 == 0, 1.0, -1.0)
            core = A * KB * JB * wgt
            S0 = core.sum(axis=(1, 2)) * sgn
            S1 = (core * (n - NPR)).sum(axis=(1, 2)) * sgn
            z0q = Z0q[:, abs(l)]
            Z0[:, n + lmax, l + lmax] = pref * S0 * z0q
            Z1[:, n + lmax, l + lmax] = -pref * (S1 / R) * Z0qp[:, abs(l)]
            if want_derivative:
                jp = 0.5 * (_j_gather(Jw, jord_nl - 1) - _j_gather(Jw, jord_nl + 1))
                dcore = (dA * KB * JB
                         + A * kprB * dX[:, None, None] * JB
                         + A * KB * jp * dw) * wgt
                dS0 = dcore.sum(axis=(1, 2)) * sgn
                Z0p[:, n + lmax, l + lmax] = (
                    dpref * S0 * z0q
                    + pref * dS0 * z0q
                    + pref * S0 * Z0qp[:, abs(l)] * ce
                )
    return Z0, Z0p, Z1

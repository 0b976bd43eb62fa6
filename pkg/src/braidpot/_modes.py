"""Shared mode-lattice and Bessel-table construction for the energy sums.

Every sum couples its indices only through the axial wavenumber k; the
builders enumerate the distinct signed k values on the index lattice, fill
Bessel/response tables per distinct value, and hand the backend reductions
integer index maps into those tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, response
from .geometry import BraidState, rod_frequencies
from .params import Truncation


@dataclass(frozen=True)
class LocalGeometry:
    """Scalars of one braid station that the mode sums consume."""

    R: float
    a: float
    eta1: float
    eta2: float
    sigma1: float
    sigma2: float
    omega_a1: float
    omega_a3: float
    xi1: float
    xi2: float
    dxi1: float
    dxi2: float
    omega_t11: float
    omega_t21: float

    @property
    def eta(self):
        return self.eta1 + self.eta2


def local_geometry(state: BraidState) -> LocalGeometry:
    fr = rod_frequencies(state)
    tl = state.tilts
    return LocalGeometry(
        R=state.R,
        a=state.a,
        eta1=tl.eta1,
        eta2=tl.eta2,
        sigma1=fr.sigma1,
        sigma2=fr.sigma2,
        omega_a1=state.omega_A[0],
        omega_a3=state.omega_A[2],
        xi1=state.xi1,
        xi2=state.xi2,
        dxi1=state.dxi1_ds,
        dxi2=state.dxi2_ds,
        omega_t11=fr.omega1[0] + state.dxi1_ds / fr.sigma1,
        omega_t21=fr.omega2[0] + state.dxi2_ds / fr.sigma2,
    )


def _unique_k(kgrid):
    kuniq, kidx = np.unique(kgrid, return_inverse=True)
    return kuniq, kidx.reshape(kgrid.shape).astype(np.int32)


def _fill_ik_tables(g: LocalGeometry, kuniq, kappa_D, ncap, mcap, jord):
    kap = np.hypot(kuniq, kappa_D)
    tabs = {
        "I1m": backend.i_orders(g.a * kap * (1.0 - math.cos(g.eta1)) / 2.0, ncap + mcap),
        "I1p": backend.i_orders(g.a * kap * (1.0 + math.cos(g.eta1)) / 2.0, mcap),
        "I2m": backend.i_orders(g.a * kap * (1.0 - math.cos(g.eta2)) / 2.0, ncap + mcap),
        "I2p": backend.i_orders(g.a * kap * (1.0 + math.cos(g.eta2)) / 2.0, mcap),
        "KT": backend.k_orders(g.R * kap, 2 * ncap),
        "J1T": backend.j_orders(g.a * kuniq * math.sin(g.eta1), jord),
        "J2T": backend.j_orders(g.a * kuniq * math.sin(g.eta2), jord),
    }
    return tabs


def _effective_caps(g: LocalGeometry, trunc: Truncation):
    """Analytic collapse of indices whose Bessel factors are Kronecker deltas."""
    mcap = trunc.m_max if g.a > 0.0 else 0
    jcap = trunc.j_max
    if g.a == 0.0 or (math.sin(g.eta1) == 0.0 and math.sin(g.eta2) == 0.0):
        jcap = 0
    ncap = trunc.n_max if g.a > 0.0 else 0
    return ncap, mcap, jcap


# ---------------------------------------------------------------------------
# no-core sum
# ---------------------------------------------------------------------------


def nocore_coefficients(g: LocalGeometry, kappa_D, trunc: Truncation):
    """Phase-coefficient matrix C[p, q] of the no-core sum and caps used."""
    ncap, mcap, jcap = _effective_caps(g, trunc)
    P = 2 * mcap + ncap + jcap
    u = np.arange(-2 * ncap, 2 * ncap + 1)[:, None, None]
    p = np.arange(-P, P + 1)[None, :, None]
    q = np.arange(-P, P + 1)[None, None, :]
    kgrid = -u * (g.omega_a1 / 2.0) - p * (g.dxi1 / 2.0) + q * (g.dxi2 / 2.0)
    kuniq, kidx = _unique_k(kgrid)
    tabs = _fill_ik_tables(g, kuniq, kappa_D, ncap, mcap, jcap)
    C, bound = backend.nocore_reduce(
        ncap, mcap, jcap, kidx,
        tabs["I1m"], tabs["I1p"], tabs["I2m"], tabs["I2p"],
        tabs["KT"], tabs["J1T"], tabs["J2T"],
    )
    return C, bound, P


def assemble_phases(C, P, xi1, xi2):
    """Sum C[p, q] e^{i(p xi1 + q xi2)}; returns (real, |imag|)."""
    p = np.arange(-P, P + 1)
    ph1 = np.exp(1j * p * xi1)
    ph2 = np.exp(1j * p * xi2)
    total = ph1 @ C @ ph2
    return float(total.real), float(abs(total.imag))


def assemble_phases_commensurate(C, P, xi1, xi2):
    """Axial average of the phase sum for equal-pitch helices.

    Phases advance together along the braid, so only the anti-phase pairs
    q = -p survive the average; the result depends on xi1 - xi2 alone.
    """
    p = np.arange(-P, P + 1)
    vals = C[np.arange(2 * P + 1), (2 * P) - np.arange(2 * P + 1)]
    total = np.sum(vals * np.exp(1j * p * (xi1 - xi2)))
    return float(total.real), float(abs(total.imag))


# ---------------------------------------------------------------------------
# direct dielectric sum
# ---------------------------------------------------------------------------


def dir_coefficients(g: LocalGeometry, kappa_D, trunc: Truncation, jwin=-1,
                     lcap=None, surf_unity=False):
    """C0/C1/C2[l, l'] of the direct sum with core response factors.

    jwin >= 0 restricts the Bessel-J orders to |.| <= jwin (used to match
    the no-core truncation shape); surf_unity replaces the surface response
    by 1 (and its slope by 0) for the eps_c -> eps_w collapse.
    """
    ncap, mcap, _ = _effective_caps(g, trunc)
    lcap = trunc.l_max if lcap is None else lcap
    jord = 2 * mcap + ncap + lcap
    l = np.arange(-lcap, lcap + 1)[:, None, None]
    lp = np.arange(-lcap, lcap + 1)[None, :, None]
    u = np.arange(-2 * ncap, 2 * ncap + 1)[None, None, :]
    kgrid = -u * (g.omega_a1 / 2.0) - l * (g.dxi1 / 2.0) + lp * (g.dxi2 / 2.0)
    kuniq, kidx = _unique_k(kgrid)
    tabs = _fill_ik_tables(g, kuniq, kappa_D, ncap, mcap, jord)
    if surf_unity:
        Z1 = np.ones((kuniq.size, lcap + 1))
        Z1p = np.zeros_like(Z1)
        Z2 = np.ones_like(Z1)
        Z2p = np.zeros_like(Z1)
    else:
        Z1, Z1p = response.zeta0_tables(lcap, kuniq * math.cos(g.eta1), g.a, kappa_D)
        Z2, Z2p = response.zeta0_tables(lcap, kuniq * math.cos(g.eta2), g.a, kappa_D)
    C0, C1, C2, bound = backend.dir_reduce(
        ncap, mcap, lcap, jwin, kidx,
        tabs["I1m"], tabs["I1p"], tabs["I2m"], tabs["I2p"],
        tabs["KT"], tabs["J1T"], tabs["J2T"],
        Z1, Z1p, Z2, Z2p,
    )
    return (C0, C1, C2), bound, lcap


def assemble_dir(cmats, lcap, g: LocalGeometry, weights):
    """Direct-term densities (E0, E1, E2) from coefficient matrices."""
    C0, C1, C2 = cmats
    l = np.arange(-lcap, lcap + 1)
    w = np.asarray(weights, dtype=float)
    ph1 = w * np.exp(1j * l * g.xi1)
    ph2 = w * np.exp(1j * l * g.xi2)
    pref = 2.0 * g.sigma1 * g.sigma2
    t0 = pref * (ph1 @ C0 @ ph2)
    t1 = pref * (math.sin(g.eta1) / g.R) * (ph1 @ C1 @ ph2)
    t2 = -pref * (math.sin(g.eta2) / g.R) * (ph1 @ C2 @ ph2)
    imag = max(abs(t0.imag), abs(t1.imag), abs(t2.imag))
    return (t0.real, t1.real, t2.real), imag


# ---------------------------------------------------------------------------
# image dielectric sums
# ---------------------------------------------------------------------------


def _inner_sum(Im, Ip, JT, ncap, mcap, lcap, kind):
    """S[qi, n, l] = sum_m Im[|n-m|] Ip[|m|] J_{order} for one rod's group.

    kind 1 uses the rod-1 order 2m - n - l, kind 2 the rod-2 order
    n - 2m - l; the J table is at the (signed) argument, negative orders
    resolved by parity.
    """
    n = np.arange(-ncap, ncap + 1)[:, None, None]
    m = np.arange(-mcap, mcap + 1)[None, :, None]
    l = np.arange(-lcap, lcap + 1)[None, None, :]
    jo = (2 * m - n - l) if kind == 1 else (n - 2 * m - l)
    a = np.abs(jo)
    v = JT[:, a]
    v = np.where((jo < 0) & (a % 2 == 1), -v, v)
    core = Im[:, np.abs(n - m)] * Ip[:, np.abs(m)] * v
    return core.sum(axis=2)


def img_coefficients(g: LocalGeometry, kappa_D, trunc: Truncation, rod,
                     diag=False, surf1_zero=False):
    """C0..C3[l_outer, j'] coefficient matrices of the E_img(rod) sum.

    l_outer is the own-rod surface order (l for rod 1, l' for rod 2); the
    phase of entry (l_outer, j') is (l_outer + j') xi_rod.  diag keeps only
    the dominant anti-phase modes j' = -l_outer.  Components:
    0 zeta*ztilde0, 1 (n-n') zeta'*ztilde0, 2 (n-n') zeta*ztilde0',
    3 zeta*ztilde1; the sin(eta) prefactors are applied at assembly.
    """
    if rod not in (1, 2):
        raise ValueError("rod must be 1 or 2")
    ncap, mcap, _ = _effective_caps(g, trunc)
    lcap = trunc.l_max
    jord = 2 * mcap + ncap + lcap
    d = np.arange(-2 * lcap, 2 * lcap + 1)[:, None]
    u = np.arange(-2 * ncap, 2 * ncap + 1)[None, :]
    dxi_own = g.dxi1 if rod == 1 else g.dxi2
    kgrid = -d * (dxi_own / 2.0) - u * (g.omega_a1 / 2.0)
    kuniq, kidx = _unique_k(kgrid)
    tabs = _fill_ik_tables(g, kuniq, kappa_D, ncap, mcap, jord)

    if rod == 1:
        q_own = -kuniq * math.cos(g.eta1)
        q_img = -kuniq * math.cos(g.eta2)
    else:
        q_own = kuniq * math.cos(g.eta2)
        q_img = kuniq * math.cos(g.eta1)
    Zs, Zsp = response.zeta0_tables(lcap, q_own, g.a, kappa_D)
    if surf1_zero:
        shape = (kuniq.size, 2 * lcap + 1, 2 * lcap + 1)
        Z0 = np.zeros(shape)
        Z0p = np.zeros(shape)
        Z1t = np.zeros(shape)
    else:
        Z0, Z0p, Z1t = response.build_surf1_tables(
            3 - rod, q_img, g.a, g.R, kappa_D, g.eta, lcap,
            trunc.np_max, trunc.mp_max,
        )

    if rod == 1:
        Sin = _inner_sum(tabs["I2m"], tabs["I2p"], tabs["J2T"], ncap, mcap, lcap, kind=2)
        Sown = _inner_sum(tabs["I1m"], tabs["I1p"], tabs["J1T"], ncap, mcap, lcap, kind=1)
    else:
        Sin = _inner_sum(tabs["I1m"], tabs["I1p"], tabs["J1T"], ncap, mcap, lcap, kind=1)
        Sown = _inner_sum(tabs["I2m"], tabs["I2p"], tabs["J2T"], ncap, mcap, lcap, kind=2)

    # fold the inner azimuthal order against the next-order response tables
    G0 = np.einsum("qnl,qlj->qnj", Sin, Z0)
    G0p = np.einsum("qnl,qlj->qnj", Sin, Z0p)
    G1 = np.einsum("qnl,qlj->qnj", Sin, Z1t)

    nsz = 2 * ncap + 1
    lsz = 2 * lcap + 1
    NI, NPI = np.meshgrid(np.arange(nsz), np.arange(nsz), indexing="ij")
    nvals = np.arange(-ncap, ncap + 1)
    sgn = np.where((nvals[None, :] % 2) == 0, 1.0, -1.0)      # (-1)^{n'}
    nmn = nvals[:, None] - nvals[None, :]                     # n - n'
    kord = np.abs(nvals[None, :] - nvals[:, None])            # |n' - n|
    U = nvals[:, None] + nvals[None, :] + 2 * ncap

    C = [np.zeros((lsz, lsz)) for _ in range(4)]
    for io, lo in enumerate(range(-lcap, lcap + 1)):
        jps = [-lo] if diag else list(range(-lcap, lcap + 1))
        for jp in jps:
            if abs(jp) > lcap:
                continue
            dI = (lo - jp) + 2 * lcap if rod == 1 else (jp - lo) + 2 * lcap
            Q = kidx[dI][U]                                  # (nsz, nsz)
            kfac = tabs["KT"][Q, kord] * sgn
            if rod == 1:
                own = Sown[Q, NI, io]                        # indexed by n
                g0 = G0[Q, NPI, jp + lcap]                   # indexed by n'
                g0p = G0p[Q, NPI, jp + lcap]
                g1 = G1[Q, NPI, jp + lcap]
            else:
                own = Sown[Q, NPI, io]                       # indexed by n'
                g0 = G0[Q, NI, jp + lcap]                    # indexed by n
                g0p = G0p[Q, NI, jp + lcap]
                g1 = G1[Q, NI, jp + lcap]
            zs = Zs[Q, abs(lo)]
            zsp = Zsp[Q, abs(lo)]
            base = kfac * own
            C[0][io, jp + lcap] = float((base * zs * g0).sum())
            if rod == 1:
                C[1][io, jp + lcap] = float((base * nmn * zsp * g0).sum())
                C[2][io, jp + lcap] = float((base * nmn * zs * g0p).sum())
            else:
                C[1][io, jp + lcap] = float((base * nmn * zs * g0p).sum())
                C[2][io, jp + lcap] = float((base * nmn * zsp * g0).sum())
            C[3][io, jp + lcap] = float((base * zs * g1).sum())
    return C, lcap


def assemble_img(cmats, lcap, g: LocalGeometry, weights, rod):
    """Image-term densities (4 components) for the given rod."""
    C0, C1, C2, C3 = cmats
    l = np.arange(-lcap, lcap + 1)
    w = np.asarray(weights, dtype=float)
    xi = g.xi1 if rod == 1 else g.xi2
    sig = g.sigma1 if rod == 1 else g.sigma2
    ph = w * np.exp(1j * l * xi)
    pref = sig * sig
    se1, se2, se = math.sin(g.eta1), math.sin(g.eta2), math.sin(g.eta)
    s1, s2 = (-1.0, 1.0) if rod == 1 else (1.0, -1.0)
    t0 = pref * (ph @ C0 @ ph)
    t1 = s1 * pref * (se1 / g.R) * (ph @ C1 @ ph)
    t2 = s2 * pref * (se2 / g.R) * (ph @ C2 @ ph)
    t3 = pref * se * (ph @ C3 @ ph)
    imag = max(abs(t0.imag), abs(t1.imag), abs(t2.imag), abs(t3.imag))
    return (t0.real, t1.real, t2.real, t3.real), imag

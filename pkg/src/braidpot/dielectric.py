"""Direct and image interaction energies for rods with low-dielectric cores.

Three evaluation levels: the full mode sums, the diagonal-mode restriction
(anti-phase azimuthal pairs, the dominant modes for near-commensurate
helices), and the small-tilt closed forms.  All densities are per unit
braid-axis length in e^2/(eps_w l_c^2) units and accept a general helical
charge spectrum through its zeta coefficients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _modes, backend, response
from .charges import ChargeModel
from .geometry import BraidState
from .params import PhysicalParams, Truncation


@dataclass(frozen=True)
class EnergyBreakdown:
    e_dir_0: float
    e_dir_1: float
    e_dir_2: float
    e_img1_parts: tuple
    e_img2_parts: tuple
    approx_level: str
    imag_residual: float = 0.0
    trunc_estimate: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def e_dir(self):
        return self.e_dir_0 + self.e_dir_1 + self.e_dir_2

    @property
    def e_img(self):
        return sum(self.e_img1_parts) + sum(self.e_img2_parts)

    @property
    def total(self):
        return self.e_dir + self.e_img


@dataclass(frozen=True)
class DiagonalModeParams:
    """Mean helix frequency and per-rod deviations for validity reporting."""

    omega_xi: float
    dxi_deviation_1: float
    dxi_deviation_2: float

    @property
    def validity_ratio(self):
        if self.omega_xi == 0.0:
            return math.inf
        return max(abs(self.dxi_deviation_1), abs(self.dxi_deviation_2)) / abs(self.omega_xi)


def _weights(charge: ChargeModel, lcap):
    return charge.weights(lcap)


def e_dir_full(state: BraidState, charge: ChargeModel, phys: PhysicalParams,
               trunc: Truncation | None = None, jwin=-1, surf_unity=False):
    """Direct-term densities (E_dir0, E_dir1, E_dir2) with core response.

    jwin >= 0 imposes the no-core Bessel-J order window (truncation-shape
    matching); surf_unity drops the dielectric response entirely.
    """
    trunc = trunc or Truncation()
    g = _modes.local_geometry(state)
    cmats, bound, lcap = _modes.dir_coefficients(
        g, phys.kappa_D, trunc, jwin=jwin, surf_unity=surf_unity
    )
    parts, imag = _modes.assemble_dir(cmats, lcap, g, _weights(charge, lcap))
    s = phys.energy_scale
    return tuple(s * p for p in parts), s * imag, s * bound


def e_img_full(rod, state: BraidState, charge: ChargeModel, phys: PhysicalParams,
               trunc: Truncation | None = None, diag=False, surf1_zero=False):
    """Image-term densities (4 components) for the given rod.

    surf1_zero replaces the next-order surface response by zero (the
    uniform-dielectric collapse, where no image interaction remains).
    """
    trunc = trunc or Truncation()
    g = _modes.local_geometry(state)
    cmats, lcap = _modes.img_coefficients(g, phys.kappa_D, trunc, rod, diag=diag,
                                          surf1_zero=surf1_zero)
    parts, imag = _modes.assemble_img(cmats, lcap, g, _weights(charge, lcap), rod)
    s = phys.energy_scale
    return tuple(s * p for p in parts), s * imag


def e_dir_diagonal(state: BraidState, charge: ChargeModel, phys: PhysicalParams,
                   trunc: Truncation | None = None, diag_params=None):
    """Direct term restricted to the anti-phase azimuthal pairs l' = -l.

    Independent evaluation path (per-mode chi products) used both as the
    cheap approximation and as the restriction oracle for the full sum.
    """
    trunc = trunc or Truncation()
    if diag_params is not None and diag_params.validity_ratio > 0.1:
        warnings.warn(
            f"diagonal-mode validity ratio {diag_params.validity_ratio:.3g} > 0.1",
            stacklevel=2,
        )
    g = _modes.local_geometry(state)
    kap_d = phys.kappa_D
    ncap, mcap, _ = _modes._effective_caps(g, trunc)
    lcap = trunc.l_max
    jord = 2 * mcap + ncap + lcap

    l = np.arange(-lcap, lcap + 1)[:, None]
    u = np.arange(-2 * ncap, 2 * ncap + 1)[None, :]
    kgrid = -u * (g.omega_a1 / 2.0) - l * ((g.dxi1 + g.dxi2) / 2.0)
    kuniq, kidx = _modes._unique_k(kgrid)
    tabs = _modes._fill_ik_tables(g, kuniq, kap_d, ncap, mcap, jord)
    Z1, Z1p = response.zeta0_tables(lcap, kuniq * math.cos(g.eta1), g.a, kap_d)
    Z2, Z2p = response.zeta0_tables(lcap, kuniq * math.cos(g.eta2), g.a, kap_d)

    S1 = _modes._inner_sum(tabs["I1m"], tabs["I1p"], tabs["J1T"], ncap, mcap, lcap, kind=1)
    S2 = _modes._inner_sum(tabs["I2m"], tabs["I2p"], tabs["J2T"], ncap, mcap, lcap, kind=2)

    nvals = np.arange(-ncap, ncap + 1)
    NI, NPI = np.meshgrid(np.arange(2 * ncap + 1), np.arange(2 * ncap + 1), indexing="ij")
    sgn = np.where((nvals[None, :] % 2) == 0, 1.0, -1.0)
    nmn = (nvals[:, None] - nvals[None, :]).astype(float)
    kord = np.abs(nvals[None, :] - nvals[:, None])
    U = nvals[:, None] + nvals[None, :] + 2 * ncap

    w = _weights(charge, lcap)
    se1, se2 = math.sin(g.eta1), math.sin(g.eta2)
    pref = 2.0 * g.sigma1 * g.sigma2 * phys.energy_scale
    tot0 = 0.0 + 0.0j
    tot12 = 0.0 + 0.0j
    for io, lo in enumerate(range(-lcap, lcap + 1)):
        Q = kidx[io][U]
        base = tabs["KT"][Q, kord] * sgn * S1[Q, NI, io] * S2[Q, NPI, 2 * lcap - io]
        z1 = Z1[Q, abs(lo)]
        z2 = Z2[Q, abs(lo)]
        phase = w[io] * w[2 * lcap - io] * np.exp(1j * lo * (g.xi1 - g.xi2))
        tot0 += phase * float((base * z1 * z2).sum())
        corr = (
            se1 * Z1p[Q, abs(lo)] * z2 - se2 * z1 * Z2p[Q, abs(lo)]
        )
        tot12 += phase * float((base * nmn * corr).sum()) / g.R
    e0 = pref * tot0
    e12 = pref * tot12
    imag = max(abs(e0.imag), abs(e12.imag))
    return (e0.real, e12.real), imag


def e_img_diagonal(rod, state: BraidState, charge: ChargeModel, phys: PhysicalParams,
                   trunc: Truncation | None = None):
    """Image term restricted to the dominant j' = -l modes."""
    return e_img_full(rod, state, charge, phys, trunc, diag=True)


# ---------------------------------------------------------------------------
# small-tilt closed forms
# ---------------------------------------------------------------------------


def omega_tilde_table(n, x, y, trunc: Truncation | None = None):
    """The image-ladder order sum in both printed forms.

    Returns (value, residual): value from the explicit-quotient form,
    residual the absolute difference against the derivative form.  Raises
    if the two forms disagree beyond 1e-9 relative.
    """
    trunc = trunc or Truncation()
    if x <= 0.0 or y <= 0.0:
        raise ValueError("x and y must be positive")
    jcap = max(trunc.np_img, 24) + abs(int(n))
    j = np.arange(-jcap, jcap + 1)
    kx = backend.k_orders(x, jcap + abs(n) + 2)
    iy = backend.i_orders(y, jcap + 2)
    ky = backend.k_orders(y, jcap + 2)
    kw = kx[np.abs(n + j + 1)] * kx[np.abs(n + j)]
    ipr = 0.5 * (iy[np.abs(np.abs(j) - 1)] + iy[np.abs(j) + 1])
    kpr = -0.5 * (ky[np.abs(np.abs(j) - 1)] + ky[np.abs(j) + 1])
    val43 = float(np.sum(kw / (y * kpr**2) * (1.0 + 2.0 * j * ipr * kpr + j * j / (y * y))))
    # derivative form: 2 (j/y) I'/K' - d/dz (I'/K'),  d/dz(I'/K') = -(1+j^2/y^2)/(y K'^2)
    val40 = float(np.sum(kw * (2.0 * (j / y) * ipr / kpr + (1.0 + j * j / (y * y)) / (y * kpr**2))))
    resid = abs(val43 - val40)
    if resid > 1e-9 * max(1.0, abs(val43)):
        raise ArithmeticError(
            f"image-ladder form mismatch: {val43:g} vs {val40:g} (residual {resid:g})"
        )
    return val43, resid


def identity_10_13_check(n, n_p, a, R, kappa):
    """Residual of the Bessel-product derivative identity used by the ladder."""
    if a <= 0.0 or R <= 0.0 or kappa <= 0.0:
        raise ValueError("arguments must be positive")
    from .bessel import bessel_i, bessel_i_prime, bessel_k, bessel_k_prime

    y, x = a * kappa, R * kappa
    nu = n_p - n
    lhs = ((n - n_p) / (R * kappa)) * (
        a * (bessel_i_prime(n, y) * bessel_i(n_p, y) + bessel_i(n, y) * bessel_i_prime(n_p, y))
        * bessel_k(nu, x)
        + R * bessel_i(n_p, y) * bessel_i(n, y) * bessel_k_prime(nu, x)
    )
    rhs = (a / 2.0) * (
        bessel_i(n, y) * (
            bessel_i(n_p - 1, y) * bessel_k(nu - 1, x)
            - bessel_i(n_p + 1, y) * bessel_k(nu + 1, x)
        )
        + bessel_i(n_p, y) * (
            bessel_i(n + 1, y) * bessel_k(nu - 1, x)
            - bessel_i(n - 1, y) * bessel_k(nu + 1, x)
        )
    )
    return abs(lhs - rhs)


def _kbar_tables(kbar, a, R, kappa_D, nmax):
    kap = np.hypot(kbar, kappa_D)
    return kap, backend.i_orders(a * kap, nmax + 1), backend.k_orders(a * kap, nmax + 1)


def e_small_angle(state: BraidState, charge: ChargeModel, phys: PhysicalParams,
                  trunc: Truncation | None = None) -> EnergyBreakdown:
    """Small-tilt closed forms of all direct and image terms.

    The axial wavenumbers sit at the commensurate-helix values; the
    omega_A3-linear shifts appear only through the *_omega terms, which
    carry the incomplete-expansion caveat in the diagnostics.
    """
    trunc = trunc or Truncation()
    g = _modes.local_geometry(state)
    a, R, kap_d = g.a, g.R, phys.kappa_D
    se = math.sin(g.eta)
    wa3 = g.omega_a3
    dxi = g.xi1 - g.xi2
    wsum = g.omega_t11 + g.omega_t21
    ncap = trunc.l_max
    npcap = trunc.np_img
    scale = phys.energy_scale

    w = charge.weights(ncap)
    nvals = np.arange(-ncap, ncap + 1)
    zz = w * w[::-1]                     # zeta_n zeta_{-n}
    csn = np.cos(nvals * dxi)
    alt = np.where(nvals % 2 == 0, 1.0, -1.0)

    # ---- direct terms over the symmetric wavenumbers
    kbar = -(nvals / 2.0) * wsum
    kapn = np.hypot(kbar, kap_d)
    e_dir0 = 0.0
    e_dir_eta = 0.0
    e_dir_w = 0.0
    for i, n in enumerate(nvals):
        kt = backend.k_orders(R * kapn[i], 1)
        kta = backend.k_orders(a * kapn[i], abs(n) + 1)
        kp = -0.5 * (kta[abs(abs(n) - 1)] + kta[abs(n) + 1])
        kpp = (1.0 + n * n / (a * kapn[i]) ** 2) * kta[abs(n)] - kp / (a * kapn[i])
        den = a * a * kapn[i] ** 2 * kp * kp
        e_dir0 += 2.0 * alt[i] * zz[i] * kt[0] * csn[i] / den
        e_dir_eta += (
            se * alt[i] * zz[i] * n * n * wsum * kt[1] * csn[i] / (den * kapn[i])
        )
        e_dir_w += (
            -(R / 4.0) * wa3 * alt[i] * zz[i] * (g.dxi1 - g.dxi2)
            * (n * n * wsum / kapn[i]) * csn[i]
            * (R * kt[1] / den + (2.0 * kt[0] / den) * (1.0 / kapn[i] + a * kpp / kp))
        )

    # ---- image terms
    npr = np.arange(-npcap, npcap + 1)
    img = {1: [0.0, 0.0, 0.0], 2: [0.0, 0.0, 0.0]}
    for rod, wmu, dximu, dmu in ((1, g.omega_t11, g.dxi1, 1.0), (2, g.omega_t21, g.dxi2, -1.0)):
        kmu = np.hypot(nvals * wmu, kap_d)
        for i, n in enumerate(nvals):
            kapb = kmu[i]
            ia = backend.i_orders(a * kapb, npcap + 2)
            ka = backend.k_orders(a * kapb, npcap + 2)
            kR = backend.k_orders(R * kapb, npcap + ncap + 2)
            kp_n = -0.5 * (ka[abs(abs(n) - 1)] + ka[abs(n) + 1])
            kord = np.abs(npr - n)
            knn = kR[kord]
            ipr = 0.5 * (ia[np.abs(np.abs(npr) - 1)] + ia[np.abs(npr) + 1])
            kpr = -0.5 * (ka[np.abs(np.abs(npr) - 1)] + ka[np.abs(npr) + 1])
            den = a * a * kapb * kapb * kp_n * kp_n
            ratio = ipr / kpr
            img[rod][0] += -(1.0 + dmu * R * wa3) * zz[i] * float(
                np.sum(ratio * knn * knn)
            ) / den
            # eta term via the ladder sum
            om, _ = omega_tilde_table(n, R * kapb, a * kapb, trunc)
            img[rod][1] += (a * wmu * se * zz[i] / den) * n * om
            # omega term: analytic kappa-derivative of the leading summand
            ipp = (1.0 + npr * npr / (a * kapb) ** 2) * ia[np.abs(npr)] - ipr / (a * kapb)
            kppn = (1.0 + npr * npr / (a * kapb) ** 2) * ka[np.abs(npr)] - kpr / (a * kapb)
            kpR = -0.5 * (kR[np.abs(kord - 1)] + kR[kord + 1])
            kpp_n = (1.0 + n * n / (a * kapb) ** 2) * ka[abs(n)] - kp_n / (a * kapb)
            dlog = (
                a * ipp / ipr
                - a * kppn / kpr
                + 2.0 * R * kpR / knn
                - 2.0 / kapb
                - 2.0 * a * kpp_n / kp_n
            )
            dF = float(np.sum(ratio * knn * knn * dlog)) / den
            img[rod][2] += -dmu * (wa3 * R / 2.0) * dximu * zz[i] * (
                n * n * wmu / kapb
            ) * dF

    diag = {
        "omega_terms_incomplete": True,
        "note": "terms linear in omega_A3 are not a systematic expansion",
    }
    return EnergyBreakdown(
        e_dir_0=scale * e_dir0,
        e_dir_1=scale * e_dir_eta,
        e_dir_2=scale * e_dir_w,
        e_img1_parts=(scale * img[1][0], scale * img[1][1], scale * img[1][2], 0.0),
        e_img2_parts=(scale * img[2][0], scale * img[2][1], scale * img[2][2], 0.0),
        approx_level="small_angle",
        diagnostics=diag,
    )


def breakdown(state: BraidState, charge: ChargeModel, phys: PhysicalParams,
              trunc: Truncation | None = None, level="full",
              diag_params=None) -> EnergyBreakdown:
    """Energy breakdown at the requested approximation level."""
    trunc = trunc or Truncation()
    if level == "small_angle":
        return e_small_angle(state, charge, phys, trunc)
    if level == "full":
        dparts, dimag, dbound = e_dir_full(state, charge, phys, trunc)
        i1, imag1 = e_img_full(1, state, charge, phys, trunc)
        i2, imag2 = e_img_full(2, state, charge, phys, trunc)
        return EnergyBreakdown(
            e_dir_0=dparts[0], e_dir_1=dparts[1], e_dir_2=dparts[2],
            e_img1_parts=i1, e_img2_parts=i2, approx_level="full",
            imag_residual=max(dimag, imag1, imag2), trunc_estimate=dbound,
        )
    if level == "diagonal":
        (d0, d12), dimag = e_dir_diagonal(state, charge, phys, trunc, diag_params)
        i1, imag1 = e_img_diagonal(1, state, charge, phys, trunc)
        i2, imag2 = e_img_diagonal(2, state, charge, phys, trunc)
        diagn = {}
        if diag_params is not None:
            diagn["validity_ratio"] = diag_params.validity_ratio
        return EnergyBreakdown(
            e_dir_0=d0, e_dir_1=d12, e_dir_2=0.0,
            e_img1_parts=i1, e_img2_parts=i2, approx_level="diagonal",
            imag_residual=max(dimag, imag1, imag2), diagnostics=diagn,
        )
    raise ValueError(f"unknown approximation level {level!r}")

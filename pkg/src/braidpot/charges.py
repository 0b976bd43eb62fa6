"""Helical surface-charge distributions as azimuthal Fourier coefficients.

The coefficients are normalised so a single helical line of charge has
coefficient 1 at every order; a uniform smear of total weight 1 keeps only
the monopole.  Delta-function components are transformed analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DnaParams:
    """Two phosphate strands plus compensating adsorbed/smeared charge."""

    theta: float
    f1: float
    f2: float
    phi_s: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.f1 < 0.0 or self.f2 < 0.0 or self.f1 + self.f2 > 1.0:
            raise ValueError("groove fractions must satisfy f1, f2 >= 0, f1 + f2 <= 1")


@dataclass(frozen=True)
class ChargeModel:
    """zeta_n coefficients, |n| <= n_max, with line-density scale in e/l_c."""

    zeta: dict
    n_max: int
    line_density_scale: float = 1.0

    def __post_init__(self):
        for n, z in self.zeta.items():
            if abs(n) > self.n_max:
                raise ValueError("coefficient order beyond n_max")
            if not math.isfinite(z):
                raise ValueError("zeta coefficients must be finite")

    def coeff(self, n):
        return self.zeta.get(n, 0.0)

    def weights(self, n_max):
        """zeta array over orders -n_max..n_max (zero-padded)."""
        return np.array([self.coeff(n) for n in range(-n_max, n_max + 1)])


def single_helix(n_max=16):
    """A single uniformly charged helical line: zeta_n = 1 for all orders."""
    return ChargeModel({n: 1.0 for n in range(-n_max, n_max + 1)}, n_max)


def dna_coefficient(p: DnaParams, n):
    """Closed-form zeta_n of the two-strand + counterion distribution."""
    if n == 0:
        # theta(1 - f1 - f2) + theta f1 + theta f2 - 1 collapses exactly
        return p.theta - 1.0
    return p.theta * p.f1 + (-1) ** n * p.theta * p.f2 - math.cos(n * p.phi_s)


def dna_model(p: DnaParams, n_max=16):
    return ChargeModel({n: dna_coefficient(p, n) for n in range(-n_max, n_max + 1)}, n_max)


def zeta_bound(p: DnaParams):
    """|zeta_n| bound for the DNA-like model."""
    return 1.0 + p.theta * (1.0 + p.f1 + p.f2)


def coefficients_from_radial(sigma_rad, n_max, n_quad=4096, deltas=()):
    """Fourier coefficients of a radial density by trapezoid quadrature.

    zeta_n = integral of sigma_rad(t) e^{i n t} dt over one turn; a uniform
    density 1/(2 pi) carries total weight 1 (monopole only).  Delta-function
    components must not be discretised: pass them as (weight, angle) pairs
    in `deltas` and keep sigma_rad to the smooth part.
    """
    t = np.arange(n_quad) * (2.0 * math.pi / n_quad)
    vals = np.asarray([sigma_rad(ti) for ti in t], dtype=float)
    zeta = {}
    for n in range(-n_max, n_max + 1):
        z = np.sum(vals * np.exp(1j * n * t)) * (2.0 * math.pi / n_quad)
        for w, ang in deltas:
            z += w * np.exp(1j * n * ang)
        if abs(z.imag) > 1e-9 * max(1.0, abs(z.real)):
            raise ValueError("radial distribution produced complex coefficients")
        zeta[n] = float(z.real)
    return ChargeModel(zeta, n_max)


def dna_from_radial(p: DnaParams, n_max=16):
    """The DNA-like model via quadrature + analytic deltas (test oracle)."""
    smear = p.theta * (1.0 - p.f1 - p.f2) / (2.0 * math.pi)
    deltas = (
        (-0.5, p.phi_s),
        (-0.5, -p.phi_s),
        (p.theta * p.f1, 0.0),
        (p.theta * p.f2, math.pi),
    )
    return coefficients_from_radial(lambda t: smear, n_max, deltas=deltas)

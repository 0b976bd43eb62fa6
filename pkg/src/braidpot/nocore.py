"""Interaction energy of two charged helices without dielectric cores.

The general six-index mode sum over Bessel products, evaluated per braid
station, plus trapezoidal accumulation along the braid.  Densities are per
unit braid-axis length in units of e^2/(eps_w l_c^2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import _modes
from .geometry import BraidState
from .params import PhysicalParams, Truncation


@dataclass(frozen=True)
class ModeIndex:
    n: int
    n_p: int
    m: int
    m_p: int
    j: int
    j_p: int


@dataclass(frozen=True)
class ModeWavenumber:
    k: float
    kappa: float


@dataclass(frozen=True)
class EnergyDensity:
    value: float
    imag_residual: float
    trunc_estimate: float


def mode_wavenumber(idx: ModeIndex, state: BraidState, kappa_D) -> ModeWavenumber:
    """Axial wavenumber selected by the tau' integration for one index set."""
    wa1 = state.omega_A[0]
    d1, d2 = state.dxi1_ds, state.dxi2_ds
    k = -(
        idx.n * (wa1 - d1)
        + idx.n_p * (wa1 - d2)
        + (2 * idx.m - idx.j) * d1
        + (2 * idx.m_p + idx.j_p) * d2
    ) / 2.0
    return ModeWavenumber(k, math.hypot(k, kappa_D))


def energy_density_nocore(state: BraidState, phys: PhysicalParams,
                          trunc: Truncation | None = None) -> EnergyDensity:
    """Per-length no-core interaction energy at one braid station."""
    trunc = trunc or Truncation()
    if phys.kappa_D * state.R <= 1.0:
        warnings.warn(
            f"kappa_D R = {phys.kappa_D * state.R:g} <= 1: local expansion marginal",
            stacklevel=2,
        )
    g = _modes.local_geometry(state)
    C, bound, P = _modes.nocore_coefficients(g, phys.kappa_D, trunc)
    re, im = _modes.assemble_phases(C, P, g.xi1, g.xi2)
    pref = 2.0 * g.sigma1 * g.sigma2 * phys.energy_scale
    return EnergyDensity(pref * re, pref * im, pref * bound)


def commensurate_average_density(state: BraidState, phys: PhysicalParams,
                                 trunc: Truncation | None = None) -> EnergyDensity:
    """Density averaged over one helix period for equal-pitch helices.

    Only the anti-phase mode pairs survive the axial average, so a single
    coefficient evaluation yields the exact per-period mean.
    """
    if state.dxi1_ds != state.dxi2_ds:
        raise ValueError("period average requires commensurate helices")
    trunc = trunc or Truncation()
    g = _modes.local_geometry(state)
    C, bound, P = _modes.nocore_coefficients(g, phys.kappa_D, trunc)
    re, im = _modes.assemble_phases_commensurate(C, P, g.xi1, g.xi2)
    pref = 2.0 * g.sigma1 * g.sigma2 * phys.energy_scale
    return EnergyDensity(pref * re, pref * im, pref * bound)


def total_energy_nocore(states, taus, phys: PhysicalParams,
                        trunc: Truncation | None = None):
    """Trapezoidal integral of the density over the braid-axis grid.

    Returns (energy, densities).  Warns when the density changes by more
    than 10% between adjacent nodes (under-resolved grid).
    """
    states = list(states)
    if len(states) != len(taus):
        raise ValueError("states and taus must have equal length")
    if len(states) == 0:
        return 0.0, []
    dens = [energy_density_nocore(s, phys, trunc) for s in states]
    vals = [d.value for d in dens]
    for a, b in zip(vals, vals[1:]):
        scale = max(abs(a), abs(b), 1e-300)
        if abs(a - b) > 0.1 * scale:
            warnings.warn("density varies more than 10% between grid nodes",
                          stacklevel=2)
            break
    total = 0.0
    for i in range(len(vals) - 1):
        total += 0.5 * (vals[i] + vals[i + 1]) * (taus[i + 1] - taus[i])
    return total, dens

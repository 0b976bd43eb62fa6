"""Screened electrostatic interaction of helically charged rods in a braid.

Mode-sum energies for the screened interaction of two charge-decorated
rods winding about a common axis, with low-dielectric-core image-charge
corrections, controlled approximation levels and a brute-force oracle.
"""

from . import backend
from .charges import ChargeModel, DnaParams, dna_model, single_helix
from .dielectric import (DiagonalModeParams, EnergyBreakdown, breakdown,
                         e_dir_diagonal, e_dir_full, e_img_diagonal,
                         e_img_full, e_small_angle, identity_10_13_check,
                         omega_tilde_table)
from .geometry import (BraidFrequencies, BraidState, EulerAngles, FrameSet,
                       TiltPair, integrate_frames, rod_frequencies)
from .nocore import energy_density_nocore, total_energy_nocore
from .oracle import DiscretizedHelix, discretize_braid, oracle_density, yukawa_energy
from .params import PhysicalParams, Truncation
from .response import (ResponseParams, zeta_img0, zeta_surf0, zeta_surf0_prime,
                       zeta_surf1, zeta_surf1_small_angle)

__version__ = "0.1.0"

__all__ = [
    "BraidFrequencies", "BraidState", "ChargeModel", "DiagonalModeParams",
    "DiscretizedHelix", "DnaParams", "EnergyBreakdown", "EulerAngles",
    "FrameSet", "PhysicalParams", "ResponseParams", "TiltPair", "Truncation",
    "backend", "breakdown", "discretize_braid", "dna_model",
    "e_dir_diagonal", "e_dir_full", "e_img_diagonal", "e_img_full",
    "e_small_angle", "energy_density_nocore", "identity_10_13_check",
    "integrate_frames", "omega_tilde_table", "oracle_density",
    "rod_frequencies", "single_helix", "total_energy_nocore",
    "yukawa_energy", "zeta_img0", "zeta_surf0", "zeta_surf0_prime",
    "zeta_surf1", "zeta_surf1_small_angle",
]

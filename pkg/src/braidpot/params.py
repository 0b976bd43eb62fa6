"""Physical constants and truncation settings shared by the energy modules."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalParams:
    """Debye screening and unit conventions.

    Energies are reported per unit braid-axis length in multiples of
    e^2/(eps_w l_c^2) (Gaussian units); energy_scale rescales the output.
    kappa_D is in inverse length units consistent with the geometry.
    """

    kappa_D: float
    energy_scale: float = 1.0
    omega_xi: float = 0.0

    def __post_init__(self):
        if self.kappa_D <= 0.0:
            raise ValueError("kappa_D must be positive")


@dataclass(frozen=True)
class Truncation:
    """Mode-sum cutoffs and series tolerance.

    n_max/m_max/j_max cap the (n, n'), (m, m') and (j, j') indices of the
    no-core sum, l_max the azimuthal charge modes of the dielectric sums,
    np_img the image-order sum of the closed small-tilt forms, and
    np_max/mp_max the internal sums of the next-order surface response.
    """

    n_max: int = 8
    m_max: int = 6
    j_max: int = 6
    l_max: int = 6
    np_img: int = 12
    np_max: int = 14
    mp_max: int = 10
    abs_tol: float = 1e-12

    def __post_init__(self):
        for name in ("n_max", "m_max", "j_max", "l_max", "np_img", "np_max", "mp_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.abs_tol <= 0.0:
            raise ValueError("abs_tol must be positive")

"""Brute-force validators: real-space Yukawa summation over discretised helices.

Builds both helices of an ideal symmetric straight regular braid in closed
form and evaluates the screened pair sum directly.  This is the
independent check for the no-core mode sum; the image-energy terms have no
real-space oracle here (they would need a boundary-value solve).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .geometry import BraidState, GeometryError


@dataclass(frozen=True)
class DiscretizedHelix:
    """Uniformly spaced samples of one charged helix.

    weight is the charge per sample in e/l_c units (rod arc length per
    sample); svals are the braid-axis stations of the samples.
    """

    points: np.ndarray
    weight: float
    svals: np.ndarray

    def __post_init__(self):
        if self.points.shape[0] != self.svals.shape[0]:
            raise ValueError("points/svals length mismatch")


def ideal_braid_frames(state: BraidState, s):
    """Closed-form frames of the symmetric straight regular braid at s."""
    wa1 = state.omega_A[0]
    sig = 1.0 / math.cos(state.eta / 2.0)
    phi = wa1 * s
    cphi, sphi = np.cos(phi), np.sin(phi)
    zero = np.zeros_like(s)
    one = np.ones_like(s)
    dh = np.stack([cphi, sphi, zero], axis=1)
    na = np.stack([-sphi, cphi, zero], axis=1)
    zh = np.stack([zero, zero, one], axis=1)
    t1 = (zh - 0.5 * state.R * wa1 * na) / sig
    t2 = (zh + 0.5 * state.R * wa1 * na) / sig
    n1 = np.cross(t1, dh)
    n2 = np.cross(t2, dh)
    return dh, na, zh, t1, t2, n1, n2, sig


def discretize_braid(state: BraidState, length, ds, kappa_D=None):
    """Sample both helices of a constant symmetric straight braid.

    Spacing ds must resolve the screening length when kappa_D is given
    (ds <= 0.02/kappa_D).  Returns the two DiscretizedHelix objects.
    """
    if abs(state.omega_A[1]) > 0.0 or abs(state.omega_A[2]) > 0.0 or state.deta_ds != 0.0:
        raise GeometryError("oracle geometry must be a symmetric straight regular braid")
    if kappa_D is not None and ds > 0.02 / kappa_D + 1e-15:
        raise ValueError("oracle resolution too coarse: need ds <= 0.02/kappa_D")
    npts = int(round(length / ds))
    if npts < 8:
        raise ValueError("braid too short for the requested spacing")
    ds = length / npts
    s = (np.arange(npts) + 0.5) * ds - length / 2.0
    dh, na, zh, t1, t2, n1, n2, sig = ideal_braid_frames(state, s)
    ra = s[:, None] * zh
    r1 = ra - 0.5 * state.R * dh
    r2 = ra + 0.5 * state.R * dh
    xi1 = state.xi1 + state.dxi1_ds * s
    xi2 = state.xi2 + state.dxi2_ds * s
    h1 = r1 + state.a * (np.cos(xi1)[:, None] * dh + np.sin(xi1)[:, None] * n1)
    h2 = r2 + state.a * (np.cos(xi2)[:, None] * dh + np.sin(xi2)[:, None] * n2)
    w = sig * ds
    return (
        DiscretizedHelix(np.ascontiguousarray(h1), w, s),
        DiscretizedHelix(np.ascontiguousarray(h2), w, s),
    )


def yukawa_energy(h1: DiscretizedHelix, h2: DiscretizedHelix, kappa_D,
                  edge_discard=None):
    """Per-unit-length screened pair energy in e^2/(eps_w l_c^2) units.

    Rod-1 charges are restricted to the central span (edge_discard from
    each end, default 8/kappa_D) while rod 2 contributes in full; pairs
    beyond 40/kappa_D are skipped (kernel < 4e-18).
    """
    if edge_discard is None:
        edge_discard = 8.0 / kappa_D
    smax = h1.svals.max()
    keep = np.abs(h1.svals) <= (smax - edge_discard + 1e-12)
    if keep.sum() < 2:
        raise ValueError("edge discard leaves no central span")
    pts1 = np.ascontiguousarray(h1.points[keep])
    w1 = np.full(pts1.shape[0], h1.weight)
    w2 = np.full(h2.points.shape[0], h2.weight)
    rcut = 40.0 / kappa_D
    total = backend.yukawa_sum(pts1, w1, np.ascontiguousarray(h2.points), w2,
                               kappa_D, rcut)
    span = h1.svals[keep].max() - h1.svals[keep].min() + (h1.svals[1] - h1.svals[0])
    return total / span


def oracle_density(state: BraidState, kappa_D, ds=None, n_periods=6,
                   edge_discard=None, min_span=None):
    """Window-averaged density of an ideal braid, window = whole helix periods.

    The helix phases make the density periodic along the braid; averaging
    over anything other than a whole number of periods would bias the
    comparison against the mode sum.
    """
    if ds is None:
        ds = 0.01 / kappa_D
    if edge_discard is None:
        edge_discard = 8.0 / kappa_D
    g = max(abs(state.dxi1_ds), abs(state.dxi2_ds))
    if g > 0.0:
        period = 2.0 * math.pi / g
        span = n_periods * period
    else:
        span = 40.0 / kappa_D
    if min_span is not None:
        span = max(span, min_span)
    length = span + 2.0 * edge_discard
    h1, h2 = discretize_braid(state, length, ds, kappa_D)
    return yukawa_energy(h1, h2, kappa_D, edge_discard)

"""Local braid-frame kinematics.

Frames, arc-length factors and angular frequencies of two rods winding
about a common axis, plus the fixed-step frame integrator used to
reconstruct centrelines.  Angles are radians throughout; lengths carry
whatever unit the caller uses consistently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    """Invalid or degenerate braid geometry."""


class StepSizeError(RuntimeError):
    """Frame integration drifted beyond the requested tolerance."""


def _wrap_angle(a):
    """Reduce an angle to (-pi, pi]."""
    a = float(a)
    if not math.isfinite(a):
        raise GeometryError("angle must be finite")
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


@dataclass(frozen=True)
class EulerAngles:
    alpha: float
    beta: float
    phi0: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _wrap_angle(self.alpha))
        object.__setattr__(self, "beta", _wrap_angle(self.beta))
        object.__setattr__(self, "phi0", _wrap_angle(self.phi0))


@dataclass(frozen=True)
class TiltPair:
    eta1: float
    eta2: float

    def __post_init__(self):
        if not (0.0 <= self.eta1 < math.pi / 2 and 0.0 <= self.eta2 < math.pi / 2):
            raise GeometryError("tilt angles must lie in [0, pi/2)")
        if self.eta1 + self.eta2 >= math.pi:
            raise GeometryError("total tilt must be below pi")

    @property
    def eta(self):
        return self.eta1 + self.eta2

    @property
    def delta_eta(self):
        return self.eta1 - self.eta2


def rotation_frame(angles: EulerAngles):
    """Product T_beta . T_alpha . T_phi0 of the three frame rotations."""
    ca, sa = math.cos(angles.alpha), math.sin(angles.alpha)
    cb, sb = math.cos(angles.beta), math.sin(angles.beta)
    cf, sf = math.cos(angles.phi0), math.sin(angles.phi0)
    t_alpha = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    t_beta = np.array([[cb, 0.0, -sb], [0.0, 1.0, 0.0], [sb, 0.0, cb]])
    t_phi = np.array([[cf, -sf, 0.0], [sf, cf, 0.0], [0.0, 0.0, 1.0]])
    return t_beta @ t_alpha @ t_phi


def sigma_from_tilts(tilts: TiltPair):
    """Arc-length factors sigma_1, sigma_2 from the two tilt angles."""
    eta = tilts.eta
    if eta == 0.0:
        return 1.0, 1.0
    s = math.sin(eta)
    if abs(s) < 1e-14:
        raise GeometryError("degenerate tilts: eta1 + eta2 ~ 0 with unequal tilts")
    return 2.0 * math.sin(tilts.eta2) / s, 2.0 * math.sin(tilts.eta1) / s


def delta_eta(eta, omega_a3, R):
    """Tilt asymmetry eta_1 - eta_2 induced by the omega_{A,3} component."""
    arg = -R * omega_a3 * math.sin(eta) / 2.0
    if abs(arg) > 1.0:
        raise GeometryError(f"|R omega_A3 sin(eta)/2| = {abs(arg):g} > 1")
    return math.asin(arg)


def omega_a1_from(eta, omega_a3, R):
    """The omega_{A,1} component consistent with constant rod separation."""
    if R <= 0.0:
        raise GeometryError("R must be positive")
    s = math.sin(eta)
    disc = 1.0 - (R * omega_a3 * s) ** 2 / 4.0
    if disc < 0.0:
        raise GeometryError("negative discriminant: |R omega_A3 sin(eta)| > 2")
    if abs(s) < 1e-6:
        # removable 0/0: expand sqrt(disc) - cos(eta) for small eta
        return -s / R + R * omega_a3**2 * s / 4.0
    return -(2.0 / (R * s)) * (math.sqrt(disc) - math.cos(eta))


@dataclass(frozen=True)
class FrameSet:
    d_hat: np.ndarray
    t1_hat: np.ndarray
    t2_hat: np.ndarray
    tA_hat: np.ndarray
    n1_hat: np.ndarray
    n2_hat: np.ndarray

    def __post_init__(self):
        for name in ("d_hat", "t1_hat", "t2_hat", "tA_hat", "n1_hat", "n2_hat"):
            v = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, v)
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise GeometryError(f"{name} is not unit length")
        for t, n in ((self.t1_hat, self.n1_hat), (self.t2_hat, self.n2_hat)):
            if abs(float(t @ self.d_hat)) > 1e-12:
                raise GeometryError("tangent not orthogonal to d_hat")
            if np.max(np.abs(np.cross(t, self.d_hat) - n)) > 1e-10:
                raise GeometryError("n_hat inconsistent with t x d")

    @classmethod
    def from_angles(cls, angles: EulerAngles, tilts: TiltPair):
        rot = rotation_frame(angles)
        d = rot @ np.array([1.0, 0.0, 0.0])
        ta = rot @ np.array([0.0, 0.0, 1.0])
        t1 = rot @ np.array([0.0, math.sin(tilts.eta1), math.cos(tilts.eta1)])
        t2 = rot @ np.array([0.0, -math.sin(tilts.eta2), math.cos(tilts.eta2)])
        return cls(d, t1, t2, ta, np.cross(t1, d), np.cross(t2, d))


@dataclass(frozen=True)
class BraidFrequencies:
    """Angular frequencies and arc-length factors of both rods and the axis."""

    omega1: np.ndarray
    omega2: np.ndarray
    omegaA: np.ndarray
    sigma1: float
    sigma2: float

    def omega(self, mu):
        return {1: self.omega1, 2: self.omega2, "A": self.omegaA}[mu]


@dataclass(frozen=True)
class BraidState:
    """Local braid geometry at one axial station.

    omega_A holds (omega_{A,1}, omega_{A,2}, omega_{A,3}); omega_{A,1} is not
    independent and must satisfy the constant-separation relation.
    """

    R: float
    a: float
    eta: float
    omega_A: np.ndarray
    xi1: float = 0.0
    xi2: float = 0.0
    dxi1_ds: float = 0.0
    dxi2_ds: float = 0.0
    deta_ds: float = 0.0
    domega_A3_ds: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega_A", np.asarray(self.omega_A, dtype=float))
        if self.R <= 2.0 * self.a:
            raise GeometryError("non-penetrating rods require R > 2a")
        if abs(self.R * self.omega_A[2] * math.sin(self.eta)) > 2.0:
            raise GeometryError("|R omega_A3 sin(eta)| > 2")
        want = omega_a1_from(self.eta, self.omega_A[2], self.R)
        if abs(self.omega_A[0] - want) > 1e-9 * max(1.0, abs(want)):
            raise GeometryError(
                f"omega_A1={self.omega_A[0]:g} inconsistent with the separation "
                f"constraint (expected {want:g})"
            )

    @classmethod
    def make(cls, R, a, eta, omega_A2=0.0, omega_A3=0.0, **kw):
        """Build a state with omega_{A,1} filled in from the constraint."""
        wa1 = omega_a1_from(eta, omega_A3, R)
        return cls(R=R, a=a, eta=eta, omega_A=np.array([wa1, omega_A2, omega_A3]), **kw)

    @property
    def delta_eta(self):
        return delta_eta(self.eta, self.omega_A[2], self.R)

    @property
    def tilts(self) -> TiltPair:
        de = self.delta_eta
        return TiltPair((self.eta + de) / 2.0, (self.eta - de) / 2.0)


def _cs_factors(x):
    """C(x) and S(x) entering the frequency decomposition; C^2 + S^2 = 1.

    C = cos(delta_eta/2) and S = sin(delta_eta/2); S carries the sign of
    -x so the closure constraints hold for either winding sense.
    """
    disc = 1.0 - x * x / 4.0
    if disc < 0.0:
        raise GeometryError("frequency decomposition argument out of range")
    root = math.sqrt(disc)
    smag = math.sqrt(max(0.0, (1.0 - root) / 2.0))
    return math.sqrt((1.0 + root) / 2.0), -math.copysign(smag, x)


def rod_frequencies(state: BraidState) -> BraidFrequencies:
    """Per-rod angular frequencies and arc-length factors of the state."""
    eta = state.eta
    wa1, wa2, wa3 = state.omega_A
    R = state.R
    se = math.sin(eta)
    out1 = np.zeros(3)
    out2 = np.zeros(3)
    if abs(se) < 1e-6:
        # removable singularity: small-angle limits
        for out, dmu in ((out1, 1.0), (out2, -1.0)):
            out[0] = wa1
            out[2] = wa3
            out[1] = (1.0 - dmu * R * wa3 / 2.0) * (
                wa2 - dmu * state.deta_ds / 2.0
                + R * (wa3 * state.deta_ds + state.domega_A3_ds * se) / 4.0
            )
        sig1 = 1.0 + R * wa3 / 2.0
        sig2 = 1.0 - R * wa3 / 2.0
        return BraidFrequencies(out1, out2, state.omega_A.copy(), sig1, sig2)

    x = R * wa3 * se
    cfac, sfac = _cs_factors(x)
    ch, sh = math.cos(eta / 2.0), math.sin(eta / 2.0)
    disc = math.sqrt(1.0 - x * x / 4.0)
    for out, dmu in ((out1, 1.0), (out2, -1.0)):
        den = 2.0 * sh * cfac - 2.0 * dmu * ch * sfac
        pre = se / den
        ucoef = cfac * ch - dmu * sfac * sh
        vcoef = dmu * sh * cfac + sfac * ch
        out[0] = pre * (ucoef * wa1 + vcoef * wa3)
        out[2] = pre * (ucoef * wa3 - vcoef * wa1)
        # the last bracket follows from differentiating the tilt-asymmetry
        # relation; cos(delta_eta) = disc, hence the /(4 disc)
        out[1] = pre * (
            wa2
            - dmu * state.deta_ds / 2.0
            + R * (wa3 * state.deta_ds * math.cos(eta) + state.domega_A3_ds * se) / (4.0 * disc)
        )
    sig1 = 1.0 / math.hypot(R * out1[0] / 2.0, 1.0 - R * out1[2] / 2.0)
    sig2 = 1.0 / math.hypot(R * out2[0] / 2.0, 1.0 + R * out2[2] / 2.0)

    tilts = state.tilts
    r1 = sig1 * math.cos(tilts.eta1) + sig2 * math.cos(tilts.eta2) - 2.0
    r2 = sig1 * math.sin(tilts.eta1) - sig2 * math.sin(tilts.eta2)
    if max(abs(r1), abs(r2)) > 1e-9:
        raise GeometryError("frequency solution violates the closure constraints")
    return BraidFrequencies(out1, out2, state.omega_A.copy(), sig1, sig2)


def helix_frequencies(state: BraidState, freqs: BraidFrequencies):
    """Total rotation rates of the helix directions about the rod tangents."""
    w11 = freqs.omega1[0] + state.dxi1_ds / freqs.sigma1
    w21 = freqs.omega2[0] + state.dxi2_ds / freqs.sigma2
    return w11, w21


def _frame_rhs(y, fr: BraidFrequencies):
    d = y[0:3]
    t1, n1 = y[3:6], y[6:9]
    t2, n2 = y[9:12], y[12:15]
    w1, w2 = fr.omega1, fr.omega2
    s1, s2 = fr.sigma1, fr.sigma2
    dd = s1 * (w1[0] * n1 - w1[2] * t1)
    dt1 = s1 * (w1[2] * d - w1[1] * n1)
    dn1 = s1 * (w1[1] * t1 - w1[0] * d)
    dt2 = s2 * (w2[2] * d - w2[1] * n2)
    dn2 = s2 * (w2[1] * t2 - w2[0] * d)
    dr1 = s1 * t1
    dr2 = s2 * t2
    return np.concatenate([dd, dt1, dn1, dt2, dn2, dr1, dr2])


def integrate_frames(initial: FrameSet, freqs, length, step, R,
                     r1_0=None, r2_0=None, drift_tol=None):
    """Fixed-step RK4 integration of the frame ODEs and centrelines.

    freqs maps arc length s to a BraidFrequencies.  Returns (s, traj) where
    traj rows hold [d, t1, n1, t2, n2, r1, r2] flattened; raises
    StepSizeError when |r1 - r2| - R drifts past drift_tol.
    """
    nsteps = int(round(length / step))
    if nsteps < 1:
        raise ValueError("length must exceed the step")
    fr0 = freqs(0.0)
    wmax = max(np.max(np.abs(fr0.omega1)), np.max(np.abs(fr0.omega2)))
    if wmax > 0.0 and step > 0.01 / wmax:
        warnings.warn(f"step {step:g} is coarse for |omega| = {wmax:g}",
                      stacklevel=2)
    if r1_0 is None:
        r1_0 = -0.5 * R * initial.d_hat
    if r2_0 is None:
        r2_0 = 0.5 * R * initial.d_hat
    y = np.concatenate(
        [initial.d_hat, initial.t1_hat, initial.n1_hat,
         initial.t2_hat, initial.n2_hat, np.asarray(r1_0, float), np.asarray(r2_0, float)]
    )
    svals = np.linspace(0.0, nsteps * step, nsteps + 1)
    traj = np.empty((nsteps + 1, y.size))
    traj[0] = y
    for i in range(nsteps):
        s = svals[i]
        k1 = _frame_rhs(y, freqs(s))
        k2 = _frame_rhs(y + 0.5 * step * k1, freqs(s + 0.5 * step))
        k3 = _frame_rhs(y + 0.5 * step * k2, freqs(s + 0.5 * step))
        k4 = _frame_rhs(y + step * k3, freqs(s + step))
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        traj[i + 1] = y
        if drift_tol is not None:
            sep = np.linalg.norm(y[15:18] - y[18:21])
            if abs(sep - R) > drift_tol:
                raise StepSizeError(
                    f"separation drift {abs(sep - R):g} exceeds {drift_tol:g} at s={s + step:g}"
                )
    return svals, traj


def separation_drift(traj, R):
    """max |  |r1 - r2| - R  | over an integrate_frames trajectory."""
    sep = np.linalg.norm(traj[:, 15:18] - traj[:, 18:21], axis=1)
    return float(np.max(np.abs(sep - R)))

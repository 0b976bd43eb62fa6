import math

import numpy as np
import pytest

from braidpot import geometry as G

from conftest import make_state


def test_rotation_frame_identity_and_quarter_turn():
    assert np.allclose(G.rotation_frame(G.EulerAngles(0, 0, 0)), np.eye(3))
    rot = G.rotation_frame(G.EulerAngles(0, 0, math.pi / 2))
    assert np.allclose(rot @ [1, 0, 0], [0, 1, 0], atol=1e-15)


def test_rotation_frame_elementwise_product():
    a, b, f = 0.3, 0.2, 0.1
    ca, sa, cb, sb, cf, sf = (math.cos(a), math.sin(a), math.cos(b),
                              math.sin(b), math.cos(f), math.sin(f))
    t_alpha = np.array([[1, 0, 0], [0, ca, -sa], [0, sa, ca]])
    t_beta = np.array([[cb, 0, -sb], [0, 1, 0], [sb, 0, cb]])
    t_phi = np.array([[cf, -sf, 0], [sf, cf, 0], [0, 0, 1]])
    expect = t_beta @ t_alpha @ t_phi
    got = G.rotation_frame(G.EulerAngles(a, b, f))
    assert np.allclose(got, expect, atol=1e-15)
    assert abs(np.linalg.det(got) - 1.0) < 1e-12
    assert np.max(np.abs(got @ got.T - np.eye(3))) < 1e-12


def test_sigma_from_tilts():
    t = G.TiltPair(math.radians(15), math.radians(15))
    s1, s2 = G.sigma_from_tilts(t)
    assert s1 == pytest.approx(2 * math.sin(math.radians(15)) / math.sin(math.radians(30)))
    assert s1 == s2
    assert G.sigma_from_tilts(G.TiltPair(0.0, 0.0)) == (1.0, 1.0)
    s1, s2 = G.sigma_from_tilts(G.TiltPair(0.4, 0.2))
    assert abs(s1 * math.cos(0.4) + s2 * math.cos(0.2) - 2.0) < 1e-12
    assert abs(s1 * math.sin(0.4) - s2 * math.sin(0.2)) < 1e-12


def test_delta_eta():
    assert G.delta_eta(0.7, 0.0, 3.0) == 0.0
    assert G.delta_eta(math.pi / 2, 0.2, 1.0) == pytest.approx(math.asin(-0.1))
    rng = np.random.default_rng(3)
    for _ in range(50):
        eta = rng.uniform(0.05, 1.3)
        R = rng.uniform(1.0, 5.0)
        w3 = rng.uniform(-1.5, 1.5) / (R * math.sin(eta))
        de = G.delta_eta(eta, w3, R)
        assert abs(math.sin(de) + R * w3 * math.sin(eta) / 2.0) < 1e-14
    with pytest.raises(G.GeometryError):
        G.delta_eta(math.pi / 2, 3.0, 1.0)


def test_omega_a1():
    assert G.omega_a1_from(math.pi / 2, 0.0, 2.0) == pytest.approx(-1.0)
    # small angle: -eta/R
    assert G.omega_a1_from(1e-4, 0.0, 3.0) == pytest.approx(-1e-4 / 3.0, rel=1e-6)
    # expansion agreement is O((R omega3)^2)
    errs = []
    for rw in (0.01, 0.02):
        eta, R = 0.6, 2.0
        w3 = rw / R
        full = G.omega_a1_from(eta, w3, R)
        lead = -2.0 * (1.0 - math.cos(eta)) / (R * math.sin(eta))
        errs.append(abs(full - lead))
    assert errs[1] / errs[0] == pytest.approx(4.0, rel=0.2)


def test_rod_frequencies_symmetric():
    st = make_state(eta=0.5, omega_A3=0.0, R=3.0)
    fr = G.rod_frequencies(st)
    assert fr.omega1[1] == 0.0 and fr.omega2[1] == 0.0
    assert fr.omega1[0] == pytest.approx(fr.omega2[0], rel=1e-14)
    assert fr.omega1[2] == pytest.approx(-fr.omega2[2], rel=1e-14)
    # the symmetric braid rotates each rod frame at -sin(eta)/R
    assert fr.omega1[0] == pytest.approx(-math.sin(0.5) / 3.0, rel=1e-12)
    assert fr.sigma1 == pytest.approx(1.0 / math.cos(0.25), rel=1e-14)


def test_rod_frequencies_small_expansion_order():
    # full formulas vs the first-order expansion: error should drop ~4x
    # when R*omega3 halves
    eta, R = 0.6, 2.0
    errs = []
    for rw in (0.02, 0.01):
        st = make_state(eta=eta, R=R, a=0.5, omega_A3=rw / R)
        fr = G.rod_frequencies(st)
        ch, sh, se = math.cos(eta / 2), math.sin(eta / 2), math.sin(eta)
        w3 = rw / R
        w11 = ch * (sh * w3 - (2 * (1 - math.cos(eta)) / (R * se))
                    * ((1 - w3 * R * ch * ch / 2) * ch + R * se * w3 / 4 * sh))
        errs.append(abs(fr.omega1[0] - w11))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.25)


def test_sigma_two_routes_agree():
    for w3 in (-0.08, 0.0, 0.05):
        st = make_state(eta=0.5, omega_A3=w3)
        fr = G.rod_frequencies(st)
        s1, s2 = G.sigma_from_tilts(st.tilts)
        assert fr.sigma1 == pytest.approx(s1, abs=1e-10)
        assert fr.sigma2 == pytest.approx(s2, abs=1e-10)


def test_ratio_identity():
    # sin(eta1)/sin(eta2) = sigma2/sigma1, written out through the
    # frequency expressions for the arc-length factors
    st = make_state(eta=0.5, omega_A3=0.05)
    fr = G.rod_frequencies(st)
    tl = st.tilts
    lhs = math.sin(tl.eta1) / math.sin(tl.eta2)
    num = math.hypot(st.R * fr.omega1[0] / 2, 1 - st.R * fr.omega1[2] / 2)
    den = math.hypot(st.R * fr.omega2[0] / 2, 1 + st.R * fr.omega2[2] / 2)
    assert lhs == pytest.approx(num / den, abs=1e-9)


def test_tilt_rate_consistency():
    # d(delta_eta)/ds by finite differences against the omega_{mu,2} route:
    # omega_{mu,2} encodes eta_mu' = (eta' + delta_mu delta_eta')/2
    R, w3 = 2.5, 0.06
    eta0, deta = 0.55, 0.04
    st = make_state(eta=eta0, R=R, omega_A3=w3, deta_ds=deta, a=0.5)
    fr = G.rod_frequencies(st)
    # sigma_mu omega_{mu,2} = omega_A2 - delta_mu eta_mu' recovers the
    # per-rod tilt rates from the frequency solution
    w12 = fr.omega1[1] * fr.sigma1
    w22 = fr.omega2[1] * fr.sigma2
    eta1p = -(w12 - st.omega_A[1])
    eta2p = +(w22 - st.omega_A[1])
    h = 1e-6
    de_p = (G.delta_eta(eta0 + h * deta, w3, R) - G.delta_eta(eta0 - h * deta, w3, R)) / (2 * h)
    assert (eta1p - eta2p) == pytest.approx(de_p, rel=1e-6)
    assert (eta1p + eta2p) == pytest.approx(deta, rel=1e-9)


def test_helix_frequencies():
    st = make_state(dxi1=0.0, dxi2=0.0)
    fr = G.rod_frequencies(st)
    w11, w21 = G.helix_frequencies(st, fr)
    assert w11 == fr.omega1[0] and w21 == fr.omega2[0]
    st2 = make_state(dxi1=1.0, dxi2=1.0)
    w11b, _ = G.helix_frequencies(st2, fr)
    assert w11b == pytest.approx(fr.omega1[0] + 1.0 / fr.sigma1)
    st3 = make_state(dxi1=-1.0, dxi2=1.0)
    w11c, _ = G.helix_frequencies(st3, fr)
    assert w11c < w11b


def test_braid_state_invariants():
    with pytest.raises(G.GeometryError):
        G.BraidState.make(R=1.9, a=1.0, eta=0.3)
    with pytest.raises(G.GeometryError):
        G.BraidState.make(R=3.0, a=1.0, eta=1.2, omega_A3=1.0)
    with pytest.raises(G.GeometryError):
        G.BraidState(R=3.0, a=1.0, eta=0.4, omega_A=np.array([0.5, 0.0, 0.0]))


def _const_freqs(state):
    fr = G.rod_frequencies(state)
    return lambda s: fr


def test_integrate_frames_period_return():
    st = make_state(eta=0.5, R=3.0)
    fr = G.rod_frequencies(st)
    frames0 = G.FrameSet.from_angles(G.EulerAngles(0, 0, 0), st.tilts)
    period = 2 * math.pi / abs(st.omega_A[0])
    s, traj = G.integrate_frames(frames0, _const_freqs(st), period, 1e-3, st.R)
    assert G.separation_drift(traj, st.R) < 1e-9 * st.R
    # frames return up to a rotation about the (straight) braid axis z:
    # the z-components of every frame vector are preserved
    assert np.allclose(traj[-1][2:15:3], traj[0][2:15:3], atol=1e-7)


def test_integrate_frames_straight_lines():
    st = G.BraidState.make(R=3.0, a=0.5, eta=0.0)
    frames0 = G.FrameSet.from_angles(G.EulerAngles(0, 0, 0), st.tilts)
    s, traj = G.integrate_frames(frames0, _const_freqs(st), 5.0, 1e-2, st.R)
    assert np.allclose(traj[:, 3:6], traj[0, 3:6], atol=1e-14)
    assert G.separation_drift(traj, st.R) < 1e-14


def test_integrate_frames_orthonormality_and_fd():
    st = make_state(eta=0.45, omega_A3=0.04)
    fr = G.rod_frequencies(st)
    frames0 = G.FrameSet.from_angles(G.EulerAngles(0.2, -0.1, 0.3), st.tilts)
    step = 1e-3
    s, traj = G.integrate_frames(frames0, _const_freqs(st), 2.0, step, st.R)
    for row in traj[:: len(traj) // 7]:
        d, t1, n1 = row[0:3], row[3:6], row[6:9]
        assert abs(np.linalg.norm(d) - 1) < 1e-10
        assert abs(np.linalg.norm(t1) - 1) < 1e-10
        assert abs(d @ t1) < 1e-10
        assert np.max(np.abs(np.cross(t1, d) - n1)) < 1e-10
    # centered finite difference of d_hat matches sigma (Omega x d)
    mid = len(traj) // 2
    fd = (traj[mid + 1][0:3] - traj[mid - 1][0:3]) / (2 * step)
    d, t1, n1 = traj[mid][0:3], traj[mid][3:6], traj[mid][6:9]
    rhs = fr.sigma1 * (fr.omega1[0] * n1 - fr.omega1[2] * t1)
    assert np.max(np.abs(fd - rhs)) < 10 * step**2


def test_integrate_frames_drift_guard():
    st = make_state()
    frames0 = G.FrameSet.from_angles(G.EulerAngles(0, 0, 0), st.tilts)
    with pytest.raises(G.StepSizeError):
        G.integrate_frames(frames0, _const_freqs(st), 10.0, 1e-3, st.R,
                           drift_tol=1e-18)

import math

import numpy as np
import pytest

from braidpot import oracle
from braidpot.bessel import bessel_k
from braidpot.geometry import (BraidState, EulerAngles, FrameSet, GeometryError,
                               integrate_frames, rod_frequencies)

from conftest import make_state


def test_zero_radius_points_on_centrelines():
    st = BraidState.make(R=3.0, a=0.0, eta=0.3, dxi1_ds=1.0, dxi2_ds=1.0)
    h1, h2 = oracle.discretize_braid(st, 20.0, 0.02, kappa_D=1.0)
    sep = np.linalg.norm(h1.points - h2.points, axis=1)
    assert np.allclose(sep, 3.0, atol=1e-12)


def test_straight_helices_at_zero_eta():
    st = BraidState.make(R=3.0, a=1.0, eta=0.0, dxi1_ds=1.5, dxi2_ds=1.5)
    h1, h2 = oracle.discretize_braid(st, 30.0, 0.02, kappa_D=1.0)
    # rods are parallel lines: radial distance from each axis equals a
    r1 = np.hypot(h1.points[:, 0] + 1.5 - 1.0 * np.cos(1.5 * h1.svals),
                  h1.points[:, 1] - 1.0 * np.sin(1.5 * h1.svals))
    assert np.max(r1) < 1e-12
    # pitch: the xi phase advances by 2 pi over 2 pi / 1.5
    period = 2 * math.pi / 1.5
    i0 = np.argmin(np.abs(h1.svals - 0.0))
    i1 = np.argmin(np.abs(h1.svals - period))
    assert np.allclose(h1.points[i0, :2], h1.points[i1, :2], atol=2e-2)


def test_frames_match_integrator():
    # closed-form braid frames against the RK4 frame integration
    st = make_state(eta=0.5, xi1=0.0, xi2=0.0, dxi1=0.0, dxi2=0.0)
    fr = rod_frequencies(st)
    frames0 = FrameSet.from_angles(EulerAngles(0, 0, 0), st.tilts)
    length, step = 4.0, 1e-3
    s, traj = integrate_frames(frames0, lambda _: fr, length, step, st.R)
    npts = int(round(length / 0.5))
    svals = np.arange(1, 5) * 1.0
    dh, na, zh, t1, t2, n1, n2, sig = oracle.ideal_braid_frames(st, svals)
    for i, sv in enumerate(svals):
        row = traj[int(round(sv / step))]
        assert np.allclose(row[0:3], dh[i], atol=1e-8)
        assert np.allclose(row[3:6], t1[i], atol=1e-8)
        r1 = row[15:18]
        assert np.allclose(r1, sv * zh[i] - 0.5 * st.R * dh[i], atol=1e-8)


def test_frame_orthogonality():
    st = make_state(eta=0.4)
    s = np.linspace(-10, 10, 101)
    dh, na, zh, t1, t2, n1, n2, sig = oracle.ideal_braid_frames(st, s)
    for t, n in ((t1, n1), (t2, n2)):
        assert np.max(np.abs(np.linalg.norm(t, axis=1) - 1)) < 1e-12
        assert np.max(np.abs(np.einsum("ij,ij->i", t, dh))) < 1e-12
        assert np.max(np.abs(np.cross(t, dh) - n)) < 1e-10


def test_line_line_reference():
    st = BraidState.make(R=3.0, a=0.0, eta=0.0)
    h1, h2 = oracle.discretize_braid(st, 60.0, 0.01, kappa_D=1.0)
    e = oracle.yukawa_energy(h1, h2, 1.0)
    assert e == pytest.approx(2.0 * bessel_k(0, 3.0), rel=2e-3)


def test_screening_ratio():
    e3 = oracle.oracle_density(BraidState.make(R=3.0, a=0.0, eta=0.0), 1.0,
                               ds=0.02, min_span=30.0)
    e6 = oracle.oracle_density(BraidState.make(R=6.0, a=0.0, eta=0.0), 1.0,
                               ds=0.02, min_span=30.0)
    assert e6 / e3 == pytest.approx(bessel_k(0, 6.0) / bessel_k(0, 3.0), rel=5e-3)


def test_euclidean_invariance():
    st = BraidState.make(R=3.0, a=0.8, eta=0.25, dxi1_ds=1.0, dxi2_ds=1.0)
    h1, h2 = oracle.discretize_braid(st, 30.0, 0.02, kappa_D=1.0)
    e0 = oracle.yukawa_energy(h1, h2, 1.0, edge_discard=5.0)
    # rigid rotation + translation of both helices
    th = 0.7
    rot = np.array([[math.cos(th), -math.sin(th), 0],
                    [math.sin(th), math.cos(th), 0],
                    [0, 0, 1.0]])
    shift = np.array([0.3, -1.2, 2.0])
    h1r = oracle.DiscretizedHelix(h1.points @ rot.T + shift, h1.weight, h1.svals)
    h2r = oracle.DiscretizedHelix(h2.points @ rot.T + shift, h2.weight, h2.svals)
    e1 = oracle.yukawa_energy(h1r, h2r, 1.0, edge_discard=5.0)
    assert e1 == pytest.approx(e0, rel=1e-12)


def test_resolution_guards():
    st = BraidState.make(R=3.0, a=0.5, eta=0.2, dxi1_ds=1.0, dxi2_ds=1.0)
    with pytest.raises(ValueError):
        oracle.discretize_braid(st, 20.0, 0.05, kappa_D=1.0)
    with pytest.raises(GeometryError):
        oracle.discretize_braid(make_state(omega_A3=0.05), 20.0, 0.01)


def test_overlap_error():
    pts = np.zeros((2, 3))
    h = oracle.DiscretizedHelix(pts, 1.0, np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        oracle.yukawa_energy(h, h, 1.0, edge_discard=0.0)


def test_ds_convergence():
    st = BraidState.make(R=2.5, a=0.5, eta=math.radians(20), dxi1_ds=1.0,
                         dxi2_ds=1.0)
    e1 = oracle.oracle_density(st, 1.0, ds=0.02, n_periods=4)
    e2 = oracle.oracle_density(st, 1.0, ds=0.01, n_periods=4)
    assert abs(e1 - e2) < 5e-4 * abs(e2)

import math
import warnings

import numpy as np
import pytest

from braidpot import nocore
from braidpot.bessel import bessel_k
from braidpot.geometry import BraidState
from braidpot.params import PhysicalParams, Truncation

from conftest import make_state


def test_mode_wavenumber_trivial(phys):
    st = make_state()
    mw = nocore.mode_wavenumber(nocore.ModeIndex(0, 0, 0, 0, 0, 0), st, phys.kappa_D)
    assert mw.k == 0.0
    assert mw.kappa == phys.kappa_D


def test_mode_wavenumber_single_mode(phys):
    st = make_state(dxi1=1.3, dxi2=0.7)
    g = st.omega_A[0]
    mw = nocore.mode_wavenumber(nocore.ModeIndex(1, 0, 0, 0, 0, 0), st, phys.kappa_D)
    assert mw.k == pytest.approx(-(g - 1.3) / 2.0, rel=1e-14)
    assert mw.kappa == pytest.approx(math.hypot(mw.k, phys.kappa_D))


def test_mode_wavenumber_swap_symmetry(phys):
    # swapping rods maps (n, m, j, dxi1) <-> (n', m', -j', dxi2) and
    # leaves the selected wavenumber unchanged
    st = make_state(dxi1=1.3, dxi2=0.7)
    st_sw = make_state(dxi1=0.7, dxi2=1.3)
    rng = np.random.default_rng(5)
    for _ in range(30):
        n, np_, m, mp_, j, jp_ = [int(v) for v in rng.integers(-4, 5, 6)]
        k1 = nocore.mode_wavenumber(nocore.ModeIndex(n, np_, m, mp_, j, jp_), st, 1.0).k
        k2 = nocore.mode_wavenumber(nocore.ModeIndex(np_, n, mp_, m, -jp_, -j), st_sw, 1.0).k
        assert k1 == pytest.approx(k2, abs=1e-14)


def test_line_charge_limit(phys):
    st = BraidState.make(R=3.0, a=0.0, eta=0.0)
    d = nocore.energy_density_nocore(st, phys)
    assert d.value == pytest.approx(2.0 * bessel_k(0, 3.0), rel=1e-12)
    assert d.imag_residual < 1e-14


def test_screening_decay(phys, trunc_small):
    d3 = nocore.energy_density_nocore(make_state(R=3.0, eta=math.radians(20), xi1=0.3,
                                                 xi2=0.3, dxi1=1.0, dxi2=1.0),
                                      phys, trunc_small)
    d10 = nocore.energy_density_nocore(make_state(R=10.0, eta=math.radians(20), xi1=0.3,
                                                  xi2=0.3, dxi1=1.0, dxi2=1.0),
                                       phys, trunc_small)
    assert abs(d10.value) * 500.0 < abs(d3.value)


def test_rod_exchange_invariance(phys, trunc_small):
    # relabelling the rods maps (xi1, xi2) -> (xi2 - pi, xi1 - pi) together
    # with the pitch swap; the energy is unchanged
    st = make_state(eta=0.4, xi1=0.7, xi2=-0.3, dxi1=1.2, dxi2=0.8)
    sw = make_state(eta=0.4, xi1=-0.3 - math.pi, xi2=0.7 - math.pi, dxi1=0.8, dxi2=1.2)
    d1 = nocore.energy_density_nocore(st, phys, trunc_small)
    d2 = nocore.energy_density_nocore(sw, phys, trunc_small)
    assert d1.value == pytest.approx(d2.value, rel=1e-10)


def test_oracle_agreement_small_tilt(phys):
    # module invariant: mode sum vs pair-sum oracle within 1% on points
    # where the local expansion is comfortably valid (tilt <= 15 deg; the
    # local-theory error grows like tan^2(eta/2) beyond that)
    from braidpot import oracle

    pts = [(2.5, 0.5, 10.0), (3.0, 1.0, 12.0), (3.5, 0.8, 15.0),
           (4.0, 1.0, 10.0), (2.8, 0.6, 14.0)]
    for rk, ak, etad in pts:
        st = BraidState.make(R=rk, a=ak, eta=math.radians(etad),
                             xi1=0.0, xi2=0.0, dxi1_ds=1.0, dxi2_ds=1.0)
        mode = nocore.commensurate_average_density(st, phys).value
        orc = oracle.oracle_density(st, 1.0, ds=0.015, n_periods=5)
        assert abs(mode - orc) / abs(orc) < 0.01


def test_realness(phys, trunc_small):
    st = make_state(eta=0.5, omega_A3=0.03, xi1=1.1, xi2=0.2, dxi1=1.4, dxi2=0.6)
    d = nocore.energy_density_nocore(st, phys, trunc_small)
    assert d.imag_residual < 1e-10 * abs(d.value)


def test_scaling_invariance(trunc_small):
    # lengths x lambda with kappa_D / lambda leaves the reduced density
    # invariant
    lam = 1.7
    st1 = make_state(R=3.0, a=1.0, eta=0.35, dxi1=1.1, dxi2=0.9)
    st2 = make_state(R=3.0 * lam, a=1.0 * lam, eta=0.35,
                     dxi1=1.1 / lam, dxi2=0.9 / lam)
    d1 = nocore.energy_density_nocore(st1, PhysicalParams(1.0), trunc_small)
    d2 = nocore.energy_density_nocore(st2, PhysicalParams(1.0 / lam), trunc_small)
    assert d1.value == pytest.approx(d2.value, rel=1e-12)


def test_truncation_monotonicity(phys):
    st = make_state(eta=0.35, xi1=0.3, xi2=0.1, dxi1=1.0, dxi2=1.0)
    base = Truncation(n_max=4, m_max=3, j_max=3)
    d0 = nocore.energy_density_nocore(st, phys, base)
    for caps in (Truncation(n_max=6, m_max=3, j_max=3),
                 Truncation(n_max=4, m_max=5, j_max=3),
                 Truncation(n_max=4, m_max=3, j_max=5)):
        d1 = nocore.energy_density_nocore(st, phys, caps)
        assert abs(d1.value - d0.value) <= d0.trunc_estimate


def test_total_energy(phys, trunc_small):
    st = make_state(xi1=0.3, xi2=0.3, dxi1=1.0, dxi2=1.0)
    taus = np.linspace(0.0, 2.0, 9)
    states = [make_state(xi1=0.3 + t, xi2=0.3 + t, dxi1=1.0, dxi2=1.0) for t in taus]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        total, dens = nocore.total_energy_nocore(states, taus, phys, trunc_small)
    # constant-state integral equals length x density
    const_states = [st] * 5
    taus_c = np.linspace(0.0, 1.5, 5)
    total_c, dens_c = nocore.total_energy_nocore(const_states, taus_c, phys, trunc_small)
    assert total_c == pytest.approx(1.5 * dens_c[0].value, rel=1e-12)
    # empty grid
    assert nocore.total_energy_nocore([], [], phys, trunc_small)[0] == 0.0


def test_total_energy_grid_refinement(phys, trunc_small):
    def states_for(n):
        taus = np.linspace(0.0, 2 * math.pi, n)
        return [make_state(xi1=t, xi2=t, dxi1=1.0, dxi2=1.0) for t in taus], taus

    s1, t1 = states_for(41)
    s2, t2 = states_for(81)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        e1, _ = nocore.total_energy_nocore(s1, t1, phys, trunc_small)
        e2, _ = nocore.total_energy_nocore(s2, t2, phys, trunc_small)
    assert abs(e2 - e1) < 1e-3 * abs(e2)


def test_grid_warning(phys, trunc_small):
    sts = [make_state(xi1=0.0, dxi1=1.0, dxi2=1.0),
           make_state(xi1=2.0, dxi1=1.0, dxi2=1.0)]
    with pytest.warns(UserWarning, match="10%"):
        nocore.total_energy_nocore(sts, [0.0, 2.0], phys, trunc_small)


def test_commensurate_average(phys, trunc_small):
    # the closed-form period average equals a dense numerical phase average
    st = make_state(eta=0.3, xi1=0.4, xi2=0.0, dxi1=1.0, dxi2=1.0)
    avg = nocore.commensurate_average_density(st, phys, trunc_small).value
    vals = []
    for t in np.arange(32) * (2 * math.pi / 32):
        stt = make_state(eta=0.3, xi1=0.4 + t, xi2=t, dxi1=1.0, dxi2=1.0)
        vals.append(nocore.energy_density_nocore(stt, phys, trunc_small).value)
    assert avg == pytest.approx(np.mean(vals), rel=1e-10)
    with pytest.raises(ValueError):
        nocore.commensurate_average_density(make_state(dxi1=1.0, dxi2=0.5),
                                            phys, trunc_small)

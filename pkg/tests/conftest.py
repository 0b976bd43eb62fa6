import math

import pytest

from braidpot.geometry import BraidState
from braidpot.params import PhysicalParams, Truncation


@pytest.fixture
def phys():
    return PhysicalParams(kappa_D=1.0)


@pytest.fixture
def trunc_small():
    """Caps small enough for quick per-test evaluation."""
    return Truncation(n_max=5, m_max=4, j_max=4, l_max=4, np_img=4,
                      np_max=12, mp_max=8)


def make_state(R=3.0, a=1.0, eta=0.35, omega_A3=0.0, xi1=0.4, xi2=-0.2,
               dxi1=1.1, dxi2=0.9, **kw):
    return BraidState.make(R=R, a=a, eta=eta, omega_A3=omega_A3,
                           xi1=xi1, xi2=xi2, dxi1_ds=dxi1, dxi2_ds=dxi2, **kw)

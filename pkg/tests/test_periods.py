import math

import numpy as np
import pytest

from kepler_monodromy.curves import CurveParams, u_chart
from kepler_monodromy.errors import CycleCollision, DegenerateFiber
from kepler_monodromy.periods import (
    NU_SIGN,
    TWO_PI,
    Cycle,
    Form,
    Lattice,
    lattice,
    mu_nu,
    mu_nu_c1_chart,
    nu_closed_form,
    period,
    period_record,
)

SAMPLE_PARAMS = [
    CurveParams(1, 1),
    CurveParams(1, -0.25),
    CurveParams(0.5 + 0.3j, -0.7 + 0.2j),
    CurveParams(-1.2j, 0.4 - 0.9j),
    CurveParams(2.0, 0.1 + 0.05j),
]


def laurent_nu(c):
    """Residue of omega2 at u = infinity from the chart data alone.

    (u - u_p)/v = (1 + (1/2 - u_p)/u + O(u^-2)) / sqrt(2) on the branch
    v ~ +sqrt(2) u, so a counterclockwise circle picks up 2 pi i times the
    1/u coefficient times the chart factor (s - r)/sqrt(c4).
    """
    ch = u_chart(c)
    return 2j * math.pi * (0.5 - ch.pole) / math.sqrt(2) * ch.scale / ch.sqrt_c4


# --- residue cycles --------------------------------------------------------

@pytest.mark.parametrize("c", SAMPLE_PARAMS)
def test_residue_periods(c):
    assert period(c, Form.Alpha, Cycle.Gamma2) == pytest.approx(-4 * math.pi, abs=1e-9)
    assert abs(period(c, Form.Alpha, Cycle.Gamma3)) < 1e-9
    assert abs(period(c, Form.Omega2, Cycle.Gamma2)) < 1e-9
    assert abs(period(c, Form.Omega2, Cycle.Gamma3)) < 1e-9


@pytest.mark.parametrize("c4", [1.0, -0.3, 0.5 + 0.5j])
def test_residue_periods_at_zero_angular_momentum(c4):
    c = CurveParams(0, c4)
    assert period(c, "alpha", "gamma2") == pytest.approx(-2 * math.pi, abs=1e-9)
    assert abs(period(c, "omega2", "gamma2")) < 1e-9
    with pytest.raises(CycleCollision):
        period(c, "alpha", "gamma3")


def test_periods_reject_degenerate_fibers():
    with pytest.raises(DegenerateFiber):
        mu_nu(CurveParams(1, -0.5))
    with pytest.raises(DegenerateFiber):
        period(CurveParams(1, 0), "alpha", "gamma2")


# --- Gamma1 ----------------------------------------------------------------

def test_nu_example():
    assert mu_nu(CurveParams(1, 1)).nu == pytest.approx(-2.221441469j, abs=1e-9)
    assert nu_closed_form(CurveParams(1, 1)) == pytest.approx(-math.pi / math.sqrt(2) * 1j)


def test_orientation_sign_is_pinned():
    # NU_SIGN is whatever makes the closed form agree with the oracle
    assert NU_SIGN == 1
    for c in SAMPLE_PARAMS:
        assert nu_closed_form(c) == pytest.approx(laurent_nu(c), rel=1e-12)


@pytest.mark.parametrize("c", SAMPLE_PARAMS)
def test_gamma1_periods_match_oracles(c):
    pair = mu_nu(c)
    assert pair.mu == pytest.approx(-TWO_PI, abs=1e-9)
    assert pair.nu == pytest.approx(laurent_nu(c), rel=1e-9)
    assert pair.nu == pytest.approx(nu_closed_form(c), rel=1e-9)


@pytest.mark.parametrize("c", SAMPLE_PARAMS)
def test_cross_chart_agreement(c):
    a = mu_nu(c).as_array()
    b = mu_nu_c1_chart(c).as_array()
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-8


@pytest.mark.parametrize("c", SAMPLE_PARAMS[:3])
def test_doubling_radius_leaves_periods_unchanged(c):
    ch = u_chart(c)
    R = 2 * (1 + abs(ch.pole))
    a = mu_nu(c, radius=R).as_array()
    b = mu_nu(c, radius=2 * R).as_array()
    assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


def test_radius_must_enclose_singularities():
    with pytest.raises(ValueError):
        mu_nu(CurveParams(1, 1), radius=0.4)


def test_halving_tolerance_keeps_agreement():
    c = SAMPLE_PARAMS[2]
    exact = laurent_nu(c)
    e1 = abs(mu_nu(c, tol=1e-6).nu - exact)
    e2 = abs(mu_nu(c, tol=5e-7).nu - exact)
    assert e2 <= max(e1, 1e-13)


@pytest.mark.parametrize("c4", [-0.45, -0.25, -0.1, -0.05])
def test_real_orbit_period_follows_third_law(c4):
    # for a real bound orbit with energy c4 the period is 2 pi a^(3/2), a = -1/(2 c4)
    nu = mu_nu(CurveParams(1, c4)).nu
    a = -1 / (2 * c4)
    assert nu == pytest.approx(TWO_PI * a ** 1.5, rel=1e-9)


# --- lattice ---------------------------------------------------------------

def test_lattice_generators_and_coordinates():
    c = CurveParams(1, -0.25)
    lat = lattice(c)
    assert lat.g2 == (TWO_PI, 0.0)
    assert lat.coordinates(lat.vector(3, -2)) == pytest.approx([3, -2], abs=1e-12)
    # the Gamma2 period vector (-4 pi, 0) is -2 g2
    assert lat.coordinates((period(c, "alpha", "gamma2"), 0)) == pytest.approx([0, -2], abs=1e-9)


def test_lattice_is_rank_two():
    for c in SAMPLE_PARAMS:
        lat = lattice(c)
        m = np.array([[lat.g1[0].real, lat.g1[0].imag, lat.g1[1].real, lat.g1[1].imag],
                      [TWO_PI, 0, 0, 0]])
        assert np.linalg.matrix_rank(m) == 2


def test_period_record_schema():
    c = CurveParams(1, 1)
    rec = period_record(c, mu_nu(c))
    assert list(rec) == ["c3", "c4", "mu", "nu", "g2"]
    assert rec["g2"] == [TWO_PI, 0]
    assert rec["nu"][1] == pytest.approx(-2.221441469, abs=1e-9)


def test_lattice_default_g2():
    assert Lattice(g1=(1, 1j)).vector(0, 1) == pytest.approx([TWO_PI, 0])

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from nslimit.profiles import (
    BumpDensity,
    GaussianDensity,
    InitialProfile,
    StepDensity,
    TableDensity,
    TableVelocity,
    WaveVelocity,
    read_table,
)


@given(
    mass=st.floats(0.05, 4.0),
    half=st.floats(0.2, 2.0),
    power=st.floats(2.0, 5.0),
    y=st.floats(-3.0, 3.0),
)
def test_bump_mass_and_cdf(mass, half, power, y):
    prof = InitialProfile(BumpDensity(mass, 0.1, half, power))
    assert prof.M0 == pytest.approx(mass, rel=1e-12)
    ref = quad(prof.rho, prof.support[0], min(max(y, prof.support[0]), prof.support[1]),
               epsabs=1e-13, epsrel=1e-12)[0]
    assert float(prof.cdf(y)) == pytest.approx(ref, abs=1e-11 * (1 + mass))


def test_step_with_ripple_has_height_times_length_mass():
    # a whole number of sine periods integrates to zero
    prof = InitialProfile(StepDensity(-1.0, 1.0, 0.5, 0.2, 2))
    assert prof.M0 == pytest.approx(1.0, rel=1e-13)
    assert prof.first_moment == pytest.approx(
        quad(lambda x: x * prof.rho(x), -1, 1, epsabs=1e-14)[0], abs=1e-12)


def test_gaussian_moments():
    v = WaveVelocity(offset=0.5)
    prof = InitialProfile(GaussianDensity(2.0, 0.3, 0.4), v)
    assert prof.M0 == pytest.approx(2.0, rel=1e-12)
    assert prof.M1 == pytest.approx(1.0, rel=1e-12)
    assert prof.first_moment == pytest.approx(0.6, rel=1e-12)


def test_invalid_step():
    with pytest.raises(ValueError):
        StepDensity(1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        StepDensity(-1.0, 1.0, 1.0, ripple=1.0)


def test_wave_velocity_derivative_matches_difference():
    v = WaveVelocity(0.1, -0.3, 0.7, 2.0, 0.4)
    x = np.linspace(-2, 2, 11)
    h = 1e-6
    assert np.allclose(v.derivative(x), (v(x + h) - v(x - h)) / (2 * h), atol=1e-8)


def test_tables_round_trip(tmp_path):
    path = tmp_path / "rho.csv"
    path.write_text("x,rho\n-1,0\n0,1\n1,0\n")
    xs, vs = read_table(path)
    dens = TableDensity(xs, vs)
    prof = InitialProfile(dens, TableVelocity(xs, (0.0, 1.0, 2.0)))
    assert prof.M0 == pytest.approx(1.0, rel=1e-12)
    assert float(prof.du(0.3)) == pytest.approx(1.0)
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n1,3\n")
    with pytest.raises(ValueError):
        read_table(bad)

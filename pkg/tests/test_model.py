import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nslimit.model import (
    FluidState,
    Grid,
    InitialData,
    InitialDataError,
    Params,
    artificial_velocity_field,
    default_kappa,
    derive_velocity_field,
    initial_data_violations,
    validate_initial_data,
)
from nslimit.profiles import BumpDensity, InitialProfile, StepDensity, WaveVelocity


def test_grid_geometry():
    g = Grid(-1.0, 1.0, 8)
    assert g.dx == 0.25
    assert np.allclose(g.centers, -1 + 0.125 + 0.25 * np.arange(8))
    assert g.faces[0] == -1.0 and g.faces[-1] == 1.0


@pytest.mark.parametrize("args", [(0.0, 1.0, 4), (1.0, 1.0, 16), (2.0, 1.0, 16)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        Grid(*args)


def test_params_defaults_and_bounds():
    p = Params()
    assert p.kappa == default_kappa(1.5) == min(1.0, 2 / 1.5, 2.0)
    assert Params(gamma=1.2).kappa == pytest.approx(1.0)
    assert Params(epsilon=0.1, gamma=1.5).bd_coefficient == pytest.approx(0.3)
    for bad in (dict(gamma=1.0), dict(gamma=1.6), dict(epsilon=-1), dict(kappa=2.5), dict(cfl=0.0)):
        with pytest.raises(ValueError):
            Params(**bad)


def test_state_arrays_are_read_only():
    s = FluidState(0.0, [1.0, 2.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        s.rho[0] = 5.0
    with pytest.raises(ValueError):
        FluidState(0.0, [1.0], [1.0, 2.0])


@pytest.mark.parametrize(
    "rho, mom, expected",
    [
        ([1.0, 1.0], [2.0, -2.0], [2.0, -2.0]),
        ([0.0, 1.0], [0.0, 3.0], [0.0, 3.0]),
        ([1e-20, 1.0], [5e-21, 1.0], [0.0, 1.0]),
    ],
)
def test_derive_velocity_examples(rho, mom, expected):
    assert np.array_equal(derive_velocity_field(rho, mom, 1e-12), expected)


def test_artificial_velocity_limits():
    u = np.array([0.3, -1.0, 2.0, 0.5])
    assert np.array_equal(artificial_velocity_field([0.2, 1.0, 3.0, 0.1], u, 0.5, Params(0.0)), u)
    assert np.allclose(artificial_velocity_field(np.ones(4), u, 0.5, Params(0.3)), u)


def test_artificial_velocity_hand_value():
    # rho = 1 + x at x = 0, 0.5, 1; central difference of sqrt(rho) at the middle
    v = artificial_velocity_field([1.0, 1.5, 2.0], np.zeros(3), 0.5, Params(0.1, 1.5))
    assert v[1] == pytest.approx(0.12426406871192856, rel=1e-14)


def test_artificial_velocity_vacuum_cells_keep_u():
    v = artificial_velocity_field([0.0, 1.0, 0.0], np.array([0.0, 1.0, 0.0]), 0.1, Params(0.1))
    assert v[0] == 0.0 and v[2] == 0.0


def test_plateau_accepted_with_exact_moments():
    g = Grid(-3.0, 3.0, 60)
    p = Params()
    d = validate_initial_data(InitialData.from_profile(InitialProfile(StepDensity(-1, 1, 1.0)), g, p), p, g)
    assert d.M0 == pytest.approx(2.0, abs=1e-13)
    assert d.M1 == 0.0
    assert abs(d.xbar0) < 1e-14
    assert np.allclose(d.rho0[(g.centers > -1) & (g.centers < 1)], 1.0, atol=1e-13)


def test_rejections_are_listed():
    g = Grid(-3.0, 3.0, 60)
    p = Params()
    rho = np.zeros(60)
    rho[30] = -1.0
    with pytest.raises(InitialDataError) as info:
        validate_initial_data(InitialData(rho, np.zeros(60)), p, g)
    assert "rho0 >= 0" in info.value.violations
    assert "M0 > 0" in info.value.violations
    assert initial_data_violations(InitialData(np.zeros(60), np.zeros(60)), p, g) == ["M0 > 0"]
    assert initial_data_violations(InitialData(np.zeros(5), np.zeros(5)), p, g)[0].startswith("arrays")


def test_tail_mass_is_rejected():
    g = Grid(-3.0, 3.0, 60)
    rho = np.zeros(60)
    rho[:3] = 1.0
    rho[30] = 1.0
    v = initial_data_violations(InitialData(rho, np.zeros(60)), Params(), g)
    assert any("kappa+2" in s for s in v)


def test_prescribed_v_recovers_profile_velocity():
    g = Grid(-4.0, 4.0, 320)
    p = Params(0.1)
    prof = InitialProfile(StepDensity(-1, 1, 0.5, 0.1), WaveVelocity(0.1, -0.1, 0.1, 1.0, 0.3))
    d = InitialData.from_profile(prof, g, p, prescribe="v")
    v = artificial_velocity_field(d.rho0, d.u0, g.dx, p)
    live = d.rho0 > 0
    assert np.allclose(v[live], prof.u(g.centers)[live], atol=1e-13)
    with pytest.raises(ValueError):
        InitialData.from_profile(prof, g, prescribe="v")
    with pytest.raises(ValueError):
        InitialData.from_profile(prof, g, p, prescribe="w")


@given(
    mass=st.floats(0.1, 3.0),
    center=st.floats(-1.0, 1.0),
    half=st.floats(0.3, 1.5),
    n=st.sampled_from([64, 128, 256]),
)
def test_cell_averages_carry_profile_mass(mass, center, half, n):
    g = Grid(-4.0, 4.0, n)
    prof = InitialProfile(BumpDensity(mass, center, half))
    d = InitialData.from_profile(prof, g)
    assert np.isclose(np.sum(d.rho0) * g.dx, mass, rtol=1e-11)
    assert np.all(d.rho0 >= 0)

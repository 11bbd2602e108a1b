import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nslimit import ns_solver
from nslimit.model import FluidState, Grid, InitialData, Params, validate_initial_data
from nslimit.ns_solver import SchemeConfig, SolverAbort, _viscous_solve, cfl_dt, simulate, step
from nslimit.profiles import BumpDensity, InitialProfile, StepDensity, WaveVelocity

G = Grid(-4.0, 4.0, 64)


def compact_state(rho_core, u_core, g=G):
    """Embed samples in the middle of the grid, vacuum near the walls."""
    n = g.n_cells
    rho = np.zeros(n)
    u = np.zeros(n)
    k = len(rho_core)
    s = (n - k) // 2
    rho[s:s + k] = rho_core
    u[s:s + k] = u_core
    return FluidState(0.0, rho, rho * u)


core = st.integers(4, 30).flatmap(
    lambda k: st.tuples(
        arrays(np.float64, k, elements=st.floats(0.01, 3.0)),
        arrays(np.float64, k, elements=st.floats(-2.0, 2.0)),
    )
)


def test_cfl_dt_fallbacks():
    z = FluidState(0.0, np.zeros(64), np.zeros(64))
    p = Params(0.1)
    assert cfl_dt(z, p, G) == p.cfl * G.dx
    g = Grid(-3.0, 3.0, 600)
    rho = ((g.centers > -1) & (g.centers < 1)).astype(float)
    plateau = FluidState(0.0, rho, np.zeros(600))
    assert cfl_dt(plateau, Params(0.0), g) == Params().cfl * g.dx


def test_cfl_dt_scales_inversely_with_speed():
    rho = np.r_[np.zeros(20), np.ones(24), np.zeros(20)]
    p = Params(0.0)
    a = cfl_dt(FluidState(0.0, rho, 40.0 * rho), p, G)
    b = cfl_dt(FluidState(0.0, rho, 80.0 * rho), p, G)
    assert a / b == pytest.approx(2.0, rel=0.05)


def test_zero_state_is_fixed():
    z = FluidState(0.0, np.zeros(64), np.zeros(64))
    out = step(z, 0.01, Params(0.1), G)
    assert not out.rho.any() and not out.mom.any() and out.t == 0.01


@given(data=core, eps=st.sampled_from([0.0, 0.01, 0.1]))
def test_one_step_conserves_mass_and_decays_momentum_exactly(data, eps):
    s = compact_state(*data)
    p = Params(eps)
    dt = cfl_dt(s, p, G)
    out = step(s, dt, p, G)
    m0 = np.sum(s.rho)
    assert abs(np.sum(out.rho) - m0) <= 1e-14 * m0
    assert np.sum(out.mom) == pytest.approx(np.exp(-dt) * np.sum(s.mom), abs=1e-13 * (1 + np.sum(np.abs(s.mom))))
    assert np.all(out.rho >= 0)


def test_viscous_solve_matches_dense_oracle():
    rng = np.random.default_rng(3)
    n = 32
    g = Grid(0.0, 1.0, n)
    rho = rng.uniform(0.2, 2.0, n)
    rho[10] = 0.0  # splits the system into two components
    m = rng.normal(size=n) * rho
    p = Params(0.2)
    dt = 0.01
    u = _viscous_solve(rho, m, dt, p, g)
    live = rho >= p.vac_threshold
    mu = p.epsilon * p.gamma * rho**p.gamma
    A = np.diag(np.where(live, rho, 1.0))
    for i in range(n - 1):
        if live[i] and live[i + 1]:
            a = dt / g.dx**2 * 0.5 * (mu[i] + mu[i + 1])
            A[i, i] += a
            A[i + 1, i + 1] += a
            A[i, i + 1] -= a
            A[i + 1, i] -= a
    ref = np.linalg.solve(A, np.where(live, m, 0.0))
    assert np.allclose(u, ref, atol=1e-12)
    assert u[10] == 0.0
    # the left component does not see the right one
    m2 = m.copy()
    m2[11:] *= -3.0
    assert np.array_equal(_viscous_solve(rho, m2, dt, p, g)[:10], u[:10])


def plateau_data(n=300):
    g = Grid(-3.0, 3.0, n)
    p = Params(0.0)
    d = validate_initial_data(InitialData.from_profile(InitialProfile(StepDensity(-1, 1, 1.0)), g, p), p, g)
    return d, p, g


def test_plateau_stays_put():
    d, p, g = plateau_data()
    s = step(d.state(), cfl_dt(d.state(), p, g), p, g)
    assert np.sum(np.abs(s.rho - d.rho0)) * g.dx <= g.dx
    traj = simulate(d, p, g, SchemeConfig(1.0, snapshot_every=25))
    assert np.sum(np.abs(traj.final.rho - d.rho0)) * g.dx <= 5 * g.dx


def test_t_end_zero_gives_initial_snapshot_only():
    d, p, g = plateau_data()
    traj = simulate(d, p, g, SchemeConfig(0.0))
    assert len(traj.snapshots) == 1 and traj.n_steps == 0
    assert traj.snapshots[0].t == 0.0 and len(traj.diagnostics) == 1


def bump_run(eps=0.05, n=200, t_end=0.5, every=7):
    g = Grid(-4.0, 4.0, n)
    p = Params(eps)
    prof = InitialProfile(BumpDensity(1.0, 0.0, 1.0), WaveVelocity(0.2, -0.3, 0.2, 2.0))
    d = validate_initial_data(InitialData.from_profile(prof, g, p), p, g)
    return d, p, g, simulate(d, p, g, SchemeConfig(t_end, snapshot_every=every))


def test_trajectory_times_and_momentum_law():
    d, p, g, traj = bump_run()
    t = traj.times
    assert t[0] == 0.0 and t[-1] == 0.5 and np.all(np.diff(t) > 0)
    m1 = np.array([r.moments.m1 for r in traj.diagnostics])
    assert np.max(np.abs(m1 - np.exp(-t) * d.M1)) <= 1e-12
    assert traj.n_steps == len(traj.dts) and sum(traj.dts) == pytest.approx(0.5)
    assert traj.boundary_leak == 0.0


def test_fixed_dt_too_large_aborts():
    d, p, g = plateau_data(60)
    rho = d.rho0
    state = InitialData(rho, np.where(rho > 0, 2.0, 0.0))
    with pytest.raises(SolverAbort, match="negative density"):
        simulate(state, p, g, SchemeConfig(1.0, dt_policy="fixed", dt=1.0))


def test_velocity_runaway_aborts(monkeypatch):
    monkeypatch.setattr(ns_solver, "U_ABORT", 0.5)
    d, p, g = plateau_data(60)
    state = InitialData(d.rho0, np.where(d.rho0 > 0, 1.0, 0.0))
    with pytest.raises(SolverAbort) as info:
        simulate(state, p, g, SchemeConfig(0.1))
    assert "max_u" in info.value.report


@pytest.mark.parametrize(
    "kw",
    [dict(t_end=-1.0), dict(t_end=1.0, snapshot_every=0), dict(t_end=1.0, dt_policy="fixed"),
     dict(t_end=1.0, dt_policy="adaptive"), dict(t_end=1.0, boundary="periodic")],
)
def test_scheme_config_validation(kw):
    with pytest.raises(ValueError):
        SchemeConfig(**kw)

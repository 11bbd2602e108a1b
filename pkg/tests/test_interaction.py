import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_energy, brute_force, brute_potential

from nslimit.interaction import (
    conv_force,
    conv_force_parts,
    conv_potential,
    conv_potential_parts,
    dK_conv,
    dK_conv_faces,
    interaction_energy,
)
from nslimit.model import Grid

densities = arrays(np.float64, st.integers(8, 80), elements=st.floats(0.0, 5.0))


def plateau(n=600, L=3.0):
    g = Grid(-L, L, n)
    return g, ((g.centers > -1) & (g.centers < 1)).astype(float)


@given(rho=densities)
def test_potential_and_force_match_double_sum(rho):
    g = Grid(-2.0, 3.0, rho.size)
    x, dx = g.centers, g.dx
    scale = 1.0 + np.sum(rho) * dx
    assert np.allclose(conv_potential(g, rho), brute_potential(x, rho, dx), atol=1e-12 * scale**2)
    assert np.allclose(conv_force(g, rho), brute_force(x, rho, dx), atol=1e-12 * scale**2)
    assert interaction_energy(g, rho) == pytest.approx(brute_energy(x, rho, dx), abs=1e-11 * scale**3)


@given(rho=densities)
def test_force_has_zero_mean_against_density(rho):
    g = Grid(-1.0, 1.0, rho.size)
    assert abs(np.sum(rho * conv_force(g, rho)) * g.dx) <= 1e-12 * (1 + np.sum(rho) * g.dx) ** 2


@given(rho=densities)
def test_energy_bounded_below_by_minus_quarter_mass_squared(rho):
    g = Grid(-2.0, 2.0, rho.size)
    m = np.sum(rho) * g.dx
    assert interaction_energy(g, rho) >= -0.25 * m * m - 1e-12 * (1 + m * m)


def test_plateau_is_force_free_inside():
    g, rho = plateau()
    k, l = conv_force_parts(g, rho)
    inside = np.abs(g.centers) < 1
    x = g.centers[inside]
    assert np.allclose(k[inside], -2 * x, atol=1e-12)
    assert np.allclose(l[inside], 2 * x, atol=1e-12)
    assert np.max(np.abs(conv_force(g, rho)[inside])) < 1e-12


def test_plateau_force_at_two():
    # K part is -2 beyond the plateau, L part is M0*x = 2x
    g = Grid(-4.0, 4.0, 4000)
    rho = ((g.centers > -1) & (g.centers < 1)).astype(float)
    i = np.argmin(np.abs(g.centers - 2.0))
    k, l = conv_force_parts(g, rho)
    x = g.centers[i]
    assert k[i] == pytest.approx(-2.0, abs=1e-12)
    assert l[i] == pytest.approx(2.0 * x, abs=1e-12)
    assert conv_force(g, rho)[i] == pytest.approx(2 * x - 2, abs=1e-12)


def test_plateau_potential_at_origin():
    g, rho = plateau(n=6000)
    i = np.argmin(np.abs(g.centers))
    k, l = conv_potential_parts(g, rho)
    # centre is half a cell off the origin; both parts are smooth there
    assert k[i] == pytest.approx(-1.0, abs=2 * g.dx)
    assert l[i] == pytest.approx(1 / 3, abs=2 * g.dx)
    assert conv_potential(g, rho)[i] == pytest.approx(-2 / 3, abs=2 * g.dx)


def test_plateau_energy_converges_to_minus_two_thirds():
    errs = []
    for n in (300, 600, 1200):
        g, rho = plateau(n)
        k, l = conv_potential_parts(g, rho)
        assert 0.5 * np.sum(rho * k) * g.dx == pytest.approx(-4 / 3, abs=4 * g.dx**2)
        assert 0.5 * np.sum(rho * l) * g.dx == pytest.approx(2 / 3, abs=4 * g.dx**2)
        errs.append(abs(interaction_energy(g, rho) + 2 / 3))
    assert errs[2] < errs[0]


def test_near_delta_potential():
    g = Grid(-4.0, 4.0, 801)
    rho = np.zeros(801)
    rho[400] = 1.0 / g.dx
    x = g.centers
    assert np.allclose(conv_potential(g, rho), -np.abs(x) + 0.5 * x * x, atol=1e-12)


def test_zero_density():
    g = Grid(-1.0, 1.0, 16)
    z = np.zeros(16)
    assert not conv_potential(g, z).any() and not conv_force(g, z).any()
    assert interaction_energy(g, z) == 0.0 and not dK_conv(g, z).any()


def test_dK_of_antisymmetric_pair():
    g = Grid(-2.0, 2.0, 400)
    x = g.centers
    r = ((x > 0) & (x < 1)).astype(float) - ((x > -1) & (x < 0)).astype(float)
    faces = dK_conv_faces(g, r)
    # right face of the last cell left of 0 is the origin
    j = np.argmin(np.abs(g.faces[1:]))
    assert faces[j] == pytest.approx(2.0, abs=1e-12)
    outside = (x < -1) | (x > 1)
    assert np.max(np.abs(dK_conv(g, r)[outside])) < 1e-12


def _matched(r, x):
    # remove mass and first moment with two smooth shapes
    a = np.exp(-x * x)
    b = x * np.exp(-x * x)
    A = np.array([[a.sum(), b.sum()], [(x * a).sum(), (x * b).sum()]])
    c = np.linalg.solve(A, [r.sum(), (x * r).sum()])
    return r - c[0] * a - c[1] * b


@given(seed=st.integers(0, 2**31 - 1), n=st.integers(16, 200))
def test_h_minus_one_identity_is_exact(seed, n):
    g = Grid(-3.0, 3.0, n)
    rng = np.random.default_rng(seed)
    r = _matched(rng.normal(size=n) * (np.abs(g.centers) < 2.5), g.centers)
    direct = 0.5 * np.sum(r * brute_potential(g.centers, r, g.dx)) * g.dx
    field = dK_conv_faces(g, r)
    assert direct == pytest.approx(0.25 * np.sum(field**2) * g.dx, abs=1e-12 * (1 + np.sum(r * r) * g.dx))

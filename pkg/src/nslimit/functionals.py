"""Scalar functionals of a fluid state and trajectory-level balances.

All spatial integrals are midpoint sums over cell centres; time integrals
over a trajectory use the trapezoid rule on the snapshot times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .interaction import conv_force, conv_potential, dK_conv_faces, interaction_energy
from .model import FluidState, Grid, Moments, Params, artificial_velocity_field, derive_velocity

MOMENT_MATCH_TOL = 1e-8


class RelativeEntropy(NamedTuple):
    total: float
    kinetic: float
    nonlocal_: float
    pressure: float


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    moments: Moments
    energy: float
    bd_entropy: float
    mv_functional: float
    rel_entropy: Optional[RelativeEntropy] = None
    boundary_leak: float = 0.0

    def row(self) -> dict:
        m = self.moments
        rel = self.rel_entropy or RelativeEntropy(np.nan, np.nan, np.nan, np.nan)
        return {
            "t": self.t,
            "m0": m.m0,
            "m1": m.m1,
            "xm": m.xm,
            "x2m": m.x2m,
            "xkm": m.xkm,
            "ukm": m.ukm,
            "energy": self.energy,
            "bd_entropy": self.bd_entropy,
            "mv": self.mv_functional,
            "rel_entropy_total": rel.total,
            "rel_kin": rel.kinetic,
            "rel_nonlocal": rel.nonlocal_,
            "rel_pressure": rel.pressure,
            "boundary_leak": self.boundary_leak,
        }


DIAGNOSTIC_COLUMNS = tuple(DiagnosticsRecord(0.0, Moments(0, 0, 0, 0, 0, 0), 0, 0, 0).row())


@dataclass(frozen=True)
class TestBump:
    """psi(t, x) = b((x - center)/width) * b((t - t_center)/t_width), b(s) = (1 - s^2)^order."""

    __test__ = False  # not a pytest class

    center: float
    width: float
    t_center: float
    t_width: float
    order: int = 3

    def __post_init__(self):
        if self.width <= 0 or self.t_width <= 0:
            raise ValueError("bump widths must be positive")
        if self.order < 3:
            raise ValueError("order >= 3 keeps psi, psi_x and psi_xx continuous")

    def _b(self, s, k: int):
        s = np.asarray(s, dtype=float)
        q = np.clip(1.0 - s * s, 0.0, None)
        n = self.order
        if k == 0:
            return q**n
        if k == 1:
            return -2.0 * n * s * q ** (n - 1)
        return -2.0 * n * q ** (n - 1) + 4.0 * n * (n - 1) * s * s * q ** (n - 2)

    def space(self, x, k: int = 0):
        s = (np.asarray(x, dtype=float) - self.center) / self.width
        return self._b(s, k) / self.width**k * (np.abs(s) < 1)

    def time(self, t, k: int = 0):
        s = (np.asarray(t, dtype=float) - self.t_center) / self.t_width
        return self._b(s, k) / self.t_width**k * (np.abs(s) < 1)


def moments(state: FluidState, p: Params, g: Grid) -> Moments:
    rho, x, dx = state.rho, g.centers, g.dx
    u = derive_velocity(state, p)
    k2 = 2.0 + p.kappa
    return Moments(
        m0=float(np.sum(rho) * dx),
        m1=float(np.sum(state.mom) * dx),
        xm=float(np.sum(x * rho) * dx),
        x2m=float(np.sum(x * x * rho) * dx),
        xkm=float(np.sum(np.abs(x) ** k2 * rho) * dx),
        ukm=float(np.sum(rho * np.abs(u) ** k2) * dx),
    )


def _pressure_potential(rho, p: Params) -> np.ndarray:
    if p.epsilon == 0.0:
        return np.zeros_like(rho)
    return p.epsilon / (p.gamma - 1.0) * np.maximum(rho, 0.0) ** p.gamma


def energy(state: FluidState, p: Params, g: Grid) -> float:
    u = derive_velocity(state, p)
    local = 0.5 * state.mom * u + _pressure_potential(state.rho, p)
    return float(np.sum(local) * g.dx) + interaction_energy(g, state.rho)


def bd_entropy(state: FluidState, p: Params, g: Grid) -> float:
    u = derive_velocity(state, p)
    v = artificial_velocity_field(state.rho, u, g.dx, p)
    return 0.5 * float(np.sum(state.rho * v * v) * g.dx) + interaction_energy(g, state.rho)


def mv_functional(state: FluidState, p: Params, g: Grid) -> float:
    m = moments(state, p, g)
    return m.ukm / (2.0 + p.kappa) + m.xkm


def nonlocal_identity(g: Grid, r) -> Optional[tuple[float, float]]:
    """(1/2 sum r (W*r) dx, 1/4 sum (dK*r)^2 dx) when r has zero mass and first moment.

    Returns None when the moments do not vanish to MOMENT_MATCH_TOL.
    """
    r = np.asarray(r, dtype=float)
    if abs(np.sum(r) * g.dx) > MOMENT_MATCH_TOL or abs(np.sum(g.centers * r) * g.dx) > MOMENT_MATCH_TOL:
        return None
    direct = 0.5 * float(np.sum(r * conv_potential(g, r))) * g.dx
    field = dK_conv_faces(g, r)
    return direct, 0.25 * float(np.sum(field * field)) * g.dx


def relative_entropy(state: FluidState, ref_rho, ref_u, p: Params, g: Grid) -> RelativeEntropy:
    """Kinetic, nonlocal and pressure parts of the distance to a reference (rho_bar, u_bar).

    The state is measured through its artificial velocity v, the reference
    through u_bar. The Bregman form reduces to eps*H(rho) on vacuum reference cells.
    """
    ref_rho = np.asarray(ref_rho, dtype=float)
    ref_u = np.asarray(ref_u, dtype=float)
    if ref_rho.shape != state.rho.shape or ref_u.shape != state.rho.shape:
        raise ValueError("state and reference live on different grids")
    dx = g.dx
    rho = state.rho
    v = artificial_velocity_field(rho, derive_velocity(state, p), dx, p)
    kinetic = 0.5 * float(np.sum(rho * (v - ref_u) ** 2) * dx)
    r = rho - ref_rho
    nonlocal_ = 0.5 * float(np.sum(r * conv_potential(g, r))) * dx
    pressure = 0.0
    if p.epsilon > 0.0:
        gm = p.gamma
        rp = np.maximum(rho, 0.0)
        H = rp**gm / gm
        bar = np.maximum(ref_rho, 0.0)
        breg = H - bar ** (gm - 1.0) * (rp - bar) - bar**gm / gm
        pressure = p.epsilon * float(np.sum(breg) * dx)
    return RelativeEntropy(kinetic + nonlocal_ + pressure, kinetic, nonlocal_, pressure)


def dissipation_rate(state: FluidState, p: Params, g: Grid) -> float:
    """eps*gamma*int rho^gamma (u_x)^2 + int rho u^2, with u_x on cell faces."""
    u = derive_velocity(state, p)
    dx = g.dx
    drag = float(np.sum(state.mom * u) * dx)
    if p.epsilon == 0.0:
        return drag
    rho = np.maximum(state.rho, 0.0)
    live = state.rho >= p.vac_threshold
    mu = 0.5 * (rho[:-1] ** p.gamma + rho[1:] ** p.gamma) * (live[:-1] & live[1:])
    visc = p.epsilon * p.gamma * float(np.sum(mu * np.diff(u) ** 2) / dx)
    return drag + visc


@dataclass(frozen=True)
class EnergyReport:
    times: np.ndarray
    delta_energy: np.ndarray
    dissipation: np.ndarray
    defect: np.ndarray

    @property
    def max_positive_defect(self) -> float:
        return float(max(0.0, np.max(self.defect))) if self.defect.size else 0.0


def energy_dissipation_report(traj, p: Params, g: Grid) -> EnergyReport:
    """Per snapshot interval: defect = E(t1) - E(t0) + int_{t0}^{t1} D dt (trapezoid)."""
    states: Sequence[FluidState] = traj.snapshots if hasattr(traj, "snapshots") else traj
    if len(states) < 2:
        raise ValueError("need at least two snapshots")
    t = np.array([s.t for s in states])
    E = np.array([energy(s, p, g) for s in states])
    D = np.array([dissipation_rate(s, p, g) for s in states])
    diss = 0.5 * (D[1:] + D[:-1]) * np.diff(t)
    dE = np.diff(E)
    return EnergyReport(t, dE, diss, dE + diss)


def _trapezoid_weights(t: np.ndarray) -> np.ndarray:
    w = np.zeros_like(t)
    h = np.diff(t)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def weak_residual(traj, psi: TestBump, p: Params, g: Grid) -> tuple[float, float]:
    """Absolute residuals of the weak continuity and momentum identities for psi.

    The viscous bracket is assembled in the square-root form
    -gamma int rho^(gamma-1/2) sqrt(rho) u psi_xx
    - 2 gamma^2/(2 gamma - 1) int d_x(rho^(gamma-1/2)) sqrt(rho) u psi_x.
    """
    states: Sequence[FluidState] = traj.snapshots if hasattr(traj, "snapshots") else traj
    x, dx = g.centers, g.dx
    lo, hi = psi.center - psi.width, psi.center + psi.width
    if lo <= g.x_min or hi >= g.x_max:
        raise ValueError("test function support touches the domain boundary")
    t = np.array([s.t for s in states])
    if psi.t_center - psi.t_width < t[0] or psi.t_center + psi.t_width > t[-1]:
        raise ValueError("test function support must lie inside the trajectory time span")
    wt = _trapezoid_weights(t)
    gm, eps = p.gamma, p.epsilon
    px0, px1, px2 = psi.space(x, 0), psi.space(x, 1), psi.space(x, 2)
    cont = mom = 0.0
    for s, w in zip(states, wt):
        if w == 0.0:
            continue
        pt0, pt1 = float(psi.time(s.t, 0)), float(psi.time(s.t, 1))
        if pt0 == 0.0 and pt1 == 0.0:
            continue
        rho, m = np.maximum(s.rho, 0.0), s.mom
        u = derive_velocity(s, p)
        cont += w * float(np.sum(rho * pt1 * px0 + m * pt0 * px1)) * dx
        lhs = m * pt1 * px0 + (m * u + eps * rho**gm) * pt0 * px1
        rhs = (m + rho * conv_force(g, rho)) * pt0 * px0
        visc = 0.0
        if eps > 0.0:
            root = np.sqrt(rho)
            half = rho ** (gm - 0.5)
            dhalf = np.gradient(half, dx)
            bracket = -gm * half * root * u * px2 - 2.0 * gm**2 / (2.0 * gm - 1.0) * dhalf * root * u * px1
            visc = eps * float(np.sum(bracket)) * pt0
        mom += w * (float(np.sum(lhs - rhs)) * dx - visc * dx)
    return abs(cont), abs(mom)

"""Finite-volume IMEX stepper for the viscous system with drag and W-interaction.

One step: upwind transport of mass and momentum with the centred pressure
gradient and the nonlocal force (explicit), a linearly implicit solve for the
degenerate viscosity at the new density, then the drag integrating factor
e^{-dt} and projection of momentum to zero on vacuum cells.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import functionals as fn
from .euler_exact import EulerSolution, euler_state_at
from .interaction import conv_force
from .model import FluidState, Grid, InitialData, Params, derive_velocity

log = logging.getLogger(__name__)

U_ABORT = 1e8


class SolverAbort(RuntimeError):
    """The run cannot continue; ``report`` says why and where."""

    def __init__(self, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.report = dict(report or {})


@dataclass(frozen=True)
class SchemeConfig:
    t_end: float
    snapshot_every: int = 1
    dt_policy: str = "cfl"
    dt: Optional[float] = None
    boundary: str = "zero-flux"
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not self.t_end >= 0:
            raise ValueError("t_end must be >= 0")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        if self.dt_policy not in ("cfl", "fixed"):
            raise ValueError(f"unknown dt_policy {self.dt_policy!r}")
        if self.dt_policy == "fixed" and not (self.dt is not None and self.dt > 0):
            raise ValueError("dt_policy 'fixed' needs dt > 0")
        if self.boundary != "zero-flux":
            raise ValueError("only zero-flux boundaries are implemented")


@dataclass
class Trajectory:
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    boundary_leak: float = 0.0
    n_steps: int = 0
    dts: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self) -> FluidState:
        return self.snapshots[-1]


def cfl_dt(state: FluidState, p: Params, g: Grid) -> float:
    """cfl*dx / max(|u| + sqrt(eps*gamma*rho^(gamma-1)) + sqrt(|f| dx)), capped at cfl*dx."""
    live = state.rho >= p.vac_threshold
    fallback = p.cfl * g.dx
    if not np.any(live):
        return fallback
    u = derive_velocity(state, p)[live]
    rho = state.rho[live]
    c = np.sqrt(p.epsilon * p.gamma * rho ** (p.gamma - 1.0))
    f = conv_force(g, state.rho)[live]
    speed = float(np.max(np.abs(u) + c + np.sqrt(np.abs(f) * g.dx)))
    return fallback / max(speed, 1.0)


def _upwind(left, right, vel):
    return np.where(vel > 0, left, right)


def _transport(rho, m, u, dt: float, p: Params, g: Grid):
    """Explicit part: new density and predicted momentum, plus would-be wall outflow."""
    dx = g.dx
    uf = 0.5 * (u[:-1] + u[1:])
    F = uf * _upwind(rho[:-1], rho[1:], uf)
    Fm = F * _upwind(u[:-1], u[1:], uf)
    flux = np.concatenate([[0.0], F, [0.0]])
    mflux = np.concatenate([[0.0], Fm, [0.0]])
    if p.epsilon > 0.0:
        pr = p.epsilon * np.maximum(rho, 0.0) ** p.gamma
        live = rho >= p.vac_threshold
        # pressure vanishes on faces touching vacuum, so the sum telescopes per component
        inner = 0.5 * (pr[:-1] + pr[1:]) * (live[:-1] & live[1:])
        pface = np.concatenate([[pr[0]], inner, [pr[-1]]])
        mflux = mflux + pface
    rho_new = rho - dt / dx * np.diff(flux)
    m_star = m - dt / dx * np.diff(mflux) - dt * rho * conv_force(g, rho)
    leak = dt * (rho[0] * max(-u[0], 0.0) + rho[-1] * max(u[-1], 0.0))
    return rho_new, m_star, leak


def _viscous_solve(rho_new, m_star, dt: float, p: Params, g: Grid) -> np.ndarray:
    """Solve rho u - dt/dx^2 [mu (u_+ - u) - mu_- (u - u_-)] = m* for u; u = 0 on vacuum."""
    n = g.n_cells
    live = rho_new >= p.vac_threshold
    if p.epsilon == 0.0:
        u = np.zeros(n)
        u[live] = m_star[live] / rho_new[live]
        return u
    mu_cell = p.epsilon * p.gamma * np.maximum(rho_new, 0.0) ** p.gamma
    mu = 0.5 * (mu_cell[:-1] + mu_cell[1:]) * (live[:-1] & live[1:])
    a = dt / g.dx**2 * mu
    diag = np.where(live, rho_new, 1.0)
    diag[:-1] += a
    diag[1:] += a
    rhs = np.where(live, m_star, 0.0)
    ab = np.zeros((3, n))
    ab[0, 1:] = -a
    ab[1] = diag
    ab[2, :-1] = -a
    try:
        u = solve_banded((1, 1), ab, rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverAbort(f"viscous solve failed: {exc}") from exc
    u[~live] = 0.0
    return u


def _advance(state: FluidState, dt: float, p: Params, g: Grid) -> tuple[FluidState, float]:
    rho, m = state.rho, state.mom
    u = derive_velocity(state, p)
    rho_new, m_star, leak = _transport(rho, m, u, dt, p, g)
    if np.any(rho_new < 0):
        i = int(np.argmin(rho_new))
        raise SolverAbort(
            f"negative density {rho_new[i]:.3e} at x={g.centers[i]:.6g}, t={state.t:.6g}; dt too large",
            {"t": state.t, "x": float(g.centers[i]), "dt": dt},
        )
    u_new = _viscous_solve(rho_new, m_star, dt, p, g)
    m_new = np.exp(-dt) * rho_new * u_new
    # vacuum projection
    m_new[rho_new < p.vac_threshold] = 0.0
    return FluidState(state.t + dt, rho_new, m_new), leak


def step(state: FluidState, dt: float, p: Params, g: Grid) -> FluidState:
    return _advance(state, dt, p, g)[0]


def diagnostics_at(state: FluidState, p: Params, g: Grid, reference: Optional[EulerSolution] = None,
                   leak: float = 0.0) -> fn.DiagnosticsRecord:
    rel = None
    if reference is not None:
        ref_rho, ref_u = euler_state_at(state.t, g, reference, cell_average=True)
        rel = fn.relative_entropy(state, ref_rho, ref_u, p, g)
    return fn.DiagnosticsRecord(
        t=state.t,
        moments=fn.moments(state, p, g),
        energy=fn.energy(state, p, g),
        bd_entropy=fn.bd_entropy(state, p, g),
        mv_functional=fn.mv_functional(state, p, g),
        rel_entropy=rel,
        boundary_leak=leak,
    )


def simulate(
    d: InitialData,
    p: Params,
    g: Grid,
    cfg: SchemeConfig,
    reference: Optional[EulerSolution] = None,
    diagnostics: bool = True,
) -> Trajectory:
    """Advance to cfg.t_end, recording every ``snapshot_every`` steps and the final state."""
    state = d.state()
    traj = Trajectory()

    def record(s: FluidState):
        traj.snapshots.append(s)
        if diagnostics:
            traj.diagnostics.append(diagnostics_at(s, p, g, reference, traj.boundary_leak))

    record(state)
    n = 0
    while state.t < cfg.t_end:
        if n >= cfg.max_steps:
            raise SolverAbort(f"max_steps={cfg.max_steps} reached at t={state.t:.6g}", {"t": state.t})
        dt = cfg.dt if cfg.dt_policy == "fixed" else cfl_dt(state, p, g)
        remaining = cfg.t_end - state.t
        if dt >= remaining * (1.0 - 1e-12):
            dt = remaining
        state, leak = _advance(state, dt, p, g)
        if dt == remaining:
            # land exactly on t_end
            state = FluidState(cfg.t_end, state.rho, state.mom)
        n += 1
        traj.boundary_leak += leak
        traj.dts.append(dt)
        umax = float(np.max(np.abs(derive_velocity(state, p))))
        if not np.isfinite(umax) or umax > U_ABORT:
            raise SolverAbort(
                f"max|u| = {umax:.3e} exceeds {U_ABORT:.0e} at t={state.t:.6g}",
                {"t": state.t, "max_u": umax, "steps": n},
            )
        if n % cfg.snapshot_every == 0 or state.t >= cfg.t_end:
            record(state)
    traj.n_steps = n
    log.debug("simulate: %d steps, leak %.3e", n, traj.boundary_leak)
    return traj

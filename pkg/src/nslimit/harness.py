"""Experiment orchestration: epsilon sweeps, refinement studies, rate fits and CSV I/O."""
from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import functionals as fn
from .config import RunConfig
from .euler_exact import EulerSolution
from .interaction import conv_force
from .model import FluidState, Grid, Params, artificial_velocity_field, derive_velocity, validate_initial_data
from .ns_solver import SchemeConfig, Trajectory, simulate
from .thresholds import classify

ORDER_CAP = math.inf


class SweepRefused(ValueError):
    """The strong solution is not global, so the sweep has no limit to converge to."""


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return "" if v is None else str(v)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    return rows[0], rows[1:]


def fit_rate(pairs) -> tuple[float, float, float]:
    """Least-squares line through (log scale, log error): (slope, intercept, rms residual)."""
    pairs = [(float(s), float(e)) for s, e in pairs]
    if len(pairs) < 3:
        raise ValueError("need at least 3 (scale, error) pairs")
    if any(not (s > 0 and e > 0) for s, e in pairs):
        raise ValueError("scales and errors must be positive")
    ls = np.log([s for s, _ in pairs])
    le = np.log([e for _, e in pairs])
    A = np.vstack([ls, np.ones_like(ls)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, le, rcond=None)
    resid = le - (slope * ls + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def observed_orders(errors: Sequence[float], floor: float = 0.0) -> list[float]:
    """log2(e_coarse/e_fine) along a halving chain; pairs at or below ``floor`` report ORDER_CAP."""
    out = []
    for a, b in zip(errors[:-1], errors[1:]):
        if b <= floor:
            out.append(ORDER_CAP)
        elif a <= floor:
            out.append(-ORDER_CAP)
        else:
            out.append(math.log2(a / b))
    return out


# trajectory persistence

TRAJECTORY_COLUMNS = ("t", "x", "rho", "u", "v", "force")


def write_trajectory(path, traj: Trajectory, p: Params, g: Grid) -> Path:
    def rows():
        for s in traj.snapshots:
            u = derive_velocity(s, p)
            v = artificial_velocity_field(s.rho, u, g.dx, p)
            f = conv_force(g, s.rho)
            for x, r, ui, vi, fi in zip(g.centers, s.rho, u, v, f):
                yield s.t, x, r, ui, vi, fi

    return write_csv(path, TRAJECTORY_COLUMNS, rows())


def read_trajectory(path) -> tuple[np.ndarray, list[FluidState]]:
    """(cell centres, snapshots) from a trajectory CSV; momentum is rebuilt as rho*u."""
    header, rows = read_csv(path)
    if tuple(header) != TRAJECTORY_COLUMNS:
        raise ValueError(f"{path}: expected columns {','.join(TRAJECTORY_COLUMNS)}")
    data = np.array(rows, dtype=float).reshape(-1, len(TRAJECTORY_COLUMNS))
    times, start = np.unique(data[:, 0], return_index=True)
    blocks = np.split(data, np.sort(start)[1:])
    xs = blocks[0][:, 1]
    snaps = []
    for b in blocks:
        if b.shape[0] != xs.size or not np.array_equal(b[:, 1], xs):
            raise ValueError(f"{path}: snapshot blocks use different grids")
        snaps.append(FluidState(float(b[0, 0]), b[:, 2], b[:, 2] * b[:, 3]))
    return xs, snaps


def write_diagnostics(path, traj: Trajectory) -> Path:
    cols = fn.DIAGNOSTIC_COLUMNS
    return write_csv(path, cols, ([r.row()[c] for c in cols] for r in traj.diagnostics))


# epsilon sweep


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    n_cells: int
    dt: float
    sup_rel_entropy: float
    rel_entropy_end: float
    rel_entropy_initial: float
    boundary_leak: float
    wall_time: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    slope: float
    intercept: float
    residual: float
    monotonicity_violations: tuple = ()

    COLUMNS = ("epsilon", "n_cells", "dt", "sup_rel_entropy", "rel_entropy_end", "rel_entropy_initial",
               "boundary_leak")

    def table(self):
        # wall time is left out so the table is reproducible byte for byte
        return [[getattr(r, c) for c in self.COLUMNS] for r in self.rows]


def coupled_cells(n_base: int, eps_max: float, eps: float) -> int:
    return int(math.ceil(n_base * eps_max / eps - 1e-9))


def _sweep_row(cfg: RunConfig, eps: float, n_cells: int, ref: EulerSolution) -> SweepRow:
    p = Params(epsilon=eps, gamma=cfg.params.gamma, kappa=cfg.params.kappa,
               vac_threshold=cfg.params.vac_threshold, cfl=cfg.params.cfl)
    g = cfg.grid(n_cells)
    d = validate_initial_data(cfg.initial_data(g, p), p, g)
    t0 = time.perf_counter()
    traj = simulate(d, p, g, cfg.scheme, reference=ref)
    wall = time.perf_counter() - t0
    E = np.array([r.rel_entropy.total for r in traj.diagnostics])
    dt = cfg.scheme.t_end / traj.n_steps if traj.n_steps else 0.0
    return SweepRow(eps, n_cells, dt, float(E.max()), float(E[-1]), float(E[0]), traj.boundary_leak, wall)


def run_epsilon_sweep(cfg: RunConfig, threads: int = 1) -> SweepResult:
    """Relative entropy to the exact pressureless solution for each epsilon, with a log-log fit."""
    exp = cfg.experiment
    eps_list = [float(e) for e in exp.get("epsilons", (0.1, 0.05, 0.025, 0.0125))]
    if any(b >= a for a, b in zip(eps_list[:-1], eps_list[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    profile = cfg.profile()
    verdict = classify(profile, t_max=exp.get("t_max", 50.0))
    if verdict.outcome != "Global":
        raise SweepRefused(
            f"initial data blow up (witness x={verdict.witness:.6g}, set {verdict.matched_set}); "
            "no global strong solution to compare against"
        )
    ref = EulerSolution.from_profile(profile)
    n_base = int(exp.get("n_base", cfg.n_cells))
    cells = [coupled_cells(n_base, eps_list[0], e) for e in eps_list]
    jobs = list(zip(eps_list, cells))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda job: _sweep_row(cfg, job[0], job[1], ref), jobs))
    else:
        rows = [_sweep_row(cfg, e, n, ref) for e, n in jobs]
    slope, intercept, resid = fit_rate([(r.epsilon, r.sup_rel_entropy) for r in rows])
    bad = tuple(
        (a.epsilon, b.epsilon) for a, b in zip(rows[:-1], rows[1:]) if b.sup_rel_entropy > a.sup_rel_entropy
    )
    return SweepResult(tuple(rows), slope, intercept, resid, bad)


# refinement study


@dataclass(frozen=True)
class RefinementResult:
    levels: tuple
    errors: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)

    METRICS = ("mass_drift", "momentum_error", "first_moment_error", "continuity_residual",
               "momentum_residual", "energy_max_positive_defect", "energy_total_defect")


def default_bump(cfg: RunConfig, xbar: float) -> fn.TestBump:
    half = 0.25 * (cfg.x_max - cfg.x_min)
    t_end = cfg.scheme.t_end
    return fn.TestBump(center=xbar, width=half, t_center=0.5 * t_end, t_width=0.4 * t_end)


def refinement_metrics(cfg: RunConfig, n_cells: int, psi: Optional[fn.TestBump] = None) -> dict:
    p = cfg.params
    g = cfg.grid(n_cells)
    d = validate_initial_data(cfg.initial_data(g, p), p, g)
    scheme = SchemeConfig(t_end=cfg.scheme.t_end, snapshot_every=1, dt_policy=cfg.scheme.dt_policy,
                          dt=cfg.scheme.dt)
    traj = simulate(d, p, g, scheme, diagnostics=False)
    dx = g.dx
    mass = np.array([np.sum(s.rho) * dx for s in traj.snapshots])
    mom = np.array([np.sum(s.mom) * dx for s in traj.snapshots])
    t = traj.times
    final = traj.final
    xm = float(np.sum(g.centers * final.rho) * dx)
    psi = psi or default_bump(cfg, d.xbar0)
    cont, momres = fn.weak_residual(traj, psi, p, g)
    rep = fn.energy_dissipation_report(traj, p, g)
    return {
        "mass_drift": float(np.max(np.abs(mass - mass[0])) / mass[0]),
        "momentum_error": float(np.max(np.abs(mom - np.exp(-t) * d.M1))),
        "first_moment_error": abs(xm - (d.xbar0 + (1.0 - math.exp(-final.t)) * d.M1)),
        "continuity_residual": cont,
        "momentum_residual": momres,
        "energy_max_positive_defect": rep.max_positive_defect,
        "energy_total_defect": float(np.sum(np.abs(rep.defect))),
    }


_FLOORS = {"mass_drift": 1e-13, "momentum_error": 1e-12}


def run_refinement_study(cfg: RunConfig, levels: Optional[Sequence[int]] = None,
                         psi: Optional[fn.TestBump] = None) -> RefinementResult:
    levels = tuple(levels or cfg.experiment.get("levels", (cfg.n_cells, 2 * cfg.n_cells, 4 * cfg.n_cells)))
    if len(levels) < 3:
        raise ValueError("a refinement study needs at least 3 levels")
    if "bump" in cfg.experiment and psi is None:
        psi = fn.TestBump(**cfg.experiment["bump"])
    runs = [refinement_metrics(cfg, n, psi) for n in levels]
    errors = {k: [r[k] for r in runs] for k in RefinementResult.METRICS}
    orders = {k: observed_orders(v, _FLOORS.get(k, 0.0)) for k, v in errors.items()}
    return RefinementResult(levels, errors, orders)

"""Command line: ``nslimit {simulate,exact,classify,sweep,verify} config.json``.

Exit codes: 0 success, 1 validation error (bad config, inadmissible data,
refused sweep, failed verification), 2 runtime abort.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import functionals as fn
from .config import ConfigError, RunConfig, load_config
from .euler_exact import DomainError, EulerSolution, NonMonotoneError, euler_state_at
from .harness import (
    SweepRefused,
    read_trajectory,
    run_epsilon_sweep,
    write_csv,
    write_diagnostics,
    write_trajectory,
)
from .model import InitialDataError, validate_initial_data
from .ns_solver import SolverAbort, simulate
from .thresholds import classify, default_sample_xs

log = logging.getLogger("nslimit")

COMMANDS = ("simulate", "exact", "classify", "sweep", "verify")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nslimit", description=__doc__.splitlines()[0])
    ap.add_argument("command", help=", ".join(COMMANDS))
    ap.add_argument("config", type=Path)
    ap.add_argument("--out-dir", type=Path, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--quiet", action="store_true")
    return ap


def _cmd_simulate(cfg: RunConfig, out: Path, args) -> int:
    p, g = cfg.params, cfg.grid()
    d = validate_initial_data(cfg.initial_data(g, p), p, g)
    ref = None
    if cfg.experiment.get("reference", False):
        profile = cfg.profile()
        if classify(profile).outcome != "Global":
            log.warning("initial data blow up; relative entropy columns left empty")
        else:
            ref = EulerSolution.from_profile(profile)
    traj = simulate(d, p, g, cfg.scheme, reference=ref)
    write_trajectory(out / "trajectory.csv", traj, p, g)
    write_diagnostics(out / "diagnostics.csv", traj)
    log.info("simulate: %d steps to t=%.6g, boundary leak %.3e", traj.n_steps, traj.final.t, traj.boundary_leak)
    return 0


def _cmd_exact(cfg: RunConfig, out: Path, args) -> int:
    g = cfg.grid()
    e = EulerSolution.from_profile(cfg.profile())
    times = cfg.experiment.get("times", [0.0, cfg.scheme.t_end])

    def rows():
        for t in times:
            rho, u = euler_state_at(float(t), g, e, cell_average=True)
            for x, r, v in zip(g.centers, rho, u):
                yield float(t), x, r, v

    write_csv(out / "exact.csv", ("t", "x", "rho", "u"), list(rows()))
    log.info("exact: %d times written", len(times))
    return 0


def _cmd_classify(cfg: RunConfig, out: Path, args) -> int:
    profile = cfg.profile()
    exp = cfg.experiment
    xs = default_sample_xs(profile, exp.get("n_samples", 64))
    v = classify(profile, xs, t_max=exp.get("t_max", 50.0))
    write_csv(
        out / "classify.csv",
        ("verdict", "witness", "matched_set", "crossing_time", "crossing_x", "marginal"),
        [(v.outcome, v.witness, v.matched_set, v.crossing_time, v.crossing_x, v.marginal)],
    )
    write_csv(
        out / "classify_points.csv",
        ("x", "rho0", "du0", "case", "matched", "sets", "margin"),
        [(x, r.values["rho0"], r.values["du0"], tag, r.matched, "|".join(r.sets), r.margin)
         for x, tag, r in v.rows],
    )
    log.info("classify: %s%s", v.outcome, " (marginal)" if v.marginal else "")
    return 0


def _cmd_sweep(cfg: RunConfig, out: Path, args) -> int:
    res = run_epsilon_sweep(cfg, threads=args.threads)
    write_csv(out / "sweep.csv", res.COLUMNS, res.table())
    write_csv(out / "sweep_fit.csv", ("slope", "intercept", "residual", "monotone", "violations"),
              [(res.slope, res.intercept, res.residual, not res.monotonicity_violations,
                ";".join(f"{a:g}>{b:g}" for a, b in res.monotonicity_violations))])
    for r in res.rows:
        log.info("eps=%g n=%d sup E=%.4e (%.1fs)", r.epsilon, r.n_cells, r.sup_rel_entropy, r.wall_time)
    log.info("slope %.4f", res.slope)
    for a, b in res.monotonicity_violations:
        log.warning("sup E increased from eps=%g to eps=%g", a, b)
    return 0


def _cmd_verify(cfg: RunConfig, out: Path, args) -> int:
    p, g = cfg.params, cfg.grid()
    if "trajectory" not in cfg.experiment:
        raise ConfigError("verify needs experiment.trajectory")
    path = Path(cfg.experiment["trajectory"])
    path = path if path.is_absolute() else cfg.base_dir / path
    xs, snaps = read_trajectory(path)
    if xs.size != g.n_cells or not np.allclose(xs, g.centers, rtol=0, atol=1e-12 * max(1.0, abs(g.x_max))):
        raise ConfigError(f"{path}: trajectory grid does not match the model block")
    dx = g.dx
    t = np.array([s.t for s in snaps])
    mass = np.array([np.sum(s.rho) * dx for s in snaps])
    mom = np.array([np.sum(s.mom) * dx for s in snaps])
    M1 = mom[0]
    checks = [
        ("times_increasing", float(np.min(np.diff(t))) if t.size > 1 else math.inf, 0.0,
         bool(t.size == 1 or np.all(np.diff(t) > 0))),
        ("min_density", float(min(s.rho.min() for s in snaps)), 0.0, bool(all(s.rho.min() >= 0 for s in snaps))),
    ]
    drift = float(np.max(np.abs(mass - mass[0])) / mass[0])
    checks.append(("mass_drift", drift, 1e-12, drift <= 1e-12))
    merr = float(np.max(np.abs(mom - np.exp(-(t - t[0])) * M1)))
    tol = 1e-10 * max(abs(M1), 1.0)
    checks.append(("momentum_decay", merr, tol, merr <= tol))
    shifted = min(fn.energy(s, p, g) + 0.25 * m**2 for s, m in zip(snaps, mass))
    checks.append(("shifted_energy_min", shifted, 0.0, shifted >= 0))
    if len(snaps) > 1:
        rep = fn.energy_dissipation_report(snaps, p, g)
        checks.append(("energy_max_positive_defect", rep.max_positive_defect, math.nan, True))
    write_csv(out / "verify.csv", ("check", "value", "tolerance", "passed"), checks)
    failed = [c[0] for c in checks if not c[3]]
    for name in failed:
        log.error("verify: %s failed", name)
    return 1 if failed else 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "exact": _cmd_exact,
    "classify": _cmd_classify,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def cli_main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except _UsageError as exc:
        print(f"nslimit: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s",
                        stream=sys.stderr, force=True)
    if args.command not in _HANDLERS:
        log.error("unknown subcommand %r (expected one of %s)", args.command, ", ".join(COMMANDS))
        return 1
    if args.threads < 1:
        log.error("--threads must be >= 1")
        return 1
    try:
        cfg = load_config(args.config)
        if cfg.kind != args.command:
            raise ConfigError(f"config experiment.kind is {cfg.kind!r}, not {args.command!r}")
        out = args.out_dir or cfg.out_dir
        return _HANDLERS[args.command](cfg, out, args)
    except (ConfigError, InitialDataError, SweepRefused, DomainError) as exc:
        log.error("%s", exc)
        return 1
    except (SolverAbort, NonMonotoneError) as exc:
        log.error("runtime abort: %s", exc)
        return 2
    except ValueError as exc:
        log.error("%s", exc)
        return 1


def main() -> None:
    sys.exit(cli_main())

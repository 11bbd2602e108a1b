#!/usr/bin/env python3
"""Epsilon sweep against the exact pressureless solution; prints the table and the fitted slope."""
import argparse
import sys
from pathlib import Path

from nslimit.config import load_config
from nslimit.harness import SweepRefused, run_epsilon_sweep, write_csv

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?", default=HERE / "configs" / "sweep_case_c.json", type=Path)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = load_config(args.config)
    try:
        res = run_epsilon_sweep(cfg, threads=args.threads)
    except SweepRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    print(f"{'eps':>8} {'cells':>6} {'sup E':>12} {'E(T)':>12} {'leak':>10} {'time':>7}")
    for r in res.rows:
        print(f"{r.epsilon:8.4g} {r.n_cells:6d} {r.sup_rel_entropy:12.4e} {r.rel_entropy_end:12.4e} "
              f"{r.boundary_leak:10.2e} {r.wall_time:6.2f}s")
    print(f"slope {res.slope:.4f}  ratio {res.rows[-1].sup_rel_entropy / res.rows[0].sup_rel_entropy:.4f}")
    out = write_csv(cfg.out_dir / "sweep.csv", res.COLUMNS, res.table())
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Three-level grid refinement at fixed epsilon: errors and observed orders per metric."""
import argparse
import sys
from pathlib import Path

from nslimit.config import load_config
from nslimit.harness import RefinementResult, run_refinement_study, write_csv

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?", default=HERE / "configs" / "refine_bump.json", type=Path)
    ap.add_argument("--levels", type=int, nargs="+")
    args = ap.parse_args()

    cfg = load_config(args.config)
    res = run_refinement_study(cfg, levels=args.levels)
    rows = []
    for k in RefinementResult.METRICS:
        errs = res.errors[k]
        print(f"{k:28s} " + "  ".join(f"{e:10.3e}" for e in errs)
              + "   orders " + "  ".join(f"{o:5.2f}" for o in res.orders[k]))
        rows.append([k, *errs, *res.orders[k]])
    n = len(res.levels)
    cols = ["metric", *(f"n{c}" for c in res.levels), *(f"order_{i}" for i in range(1, n))]
    print(f"wrote {write_csv(cfg.out_dir / 'refinement.csv', cols, rows)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Randomised check that the pointwise threshold verdict predicts characteristic crossing."""
import argparse
import math
import sys
from pathlib import Path

import numpy as np

from nslimit.harness import write_csv
from nslimit.profiles import BumpDensity, InitialProfile, StepDensity, WaveVelocity
from nslimit.thresholds import classify, crossing_scan, default_sample_xs

HERE = Path(__file__).resolve().parent


def random_profile(rng):
    regime = rng.integers(3)
    mass = (rng.uniform(0.05, 0.22), 0.25, rng.uniform(0.3, 3.0))[regime]
    if rng.random() < 0.5:
        den = BumpDensity(mass, 0.0, rng.uniform(0.5, 2.0), rng.uniform(2.0, 4.0))
    else:
        half = rng.uniform(0.5, 2.0)
        den = StepDensity(-half, half, mass / (2 * half), rng.uniform(-0.5, 0.5), int(rng.integers(1, 3)))
    vel = WaveVelocity(rng.normal(), 0.5 * rng.normal(), rng.normal() * rng.uniform(0, 2),
                       rng.uniform(0.5, 4.0), rng.uniform(0, 2 * math.pi))
    return InitialProfile(den, vel)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--t-max", type=float, default=50.0)
    ap.add_argument("--out", type=Path, default=HERE.parent / "out" / "threshold_study.csv")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rows, agree, counted = [], 0, 0
    for k in range(args.samples):
        prof = random_profile(rng)
        xs = default_sample_xs(prof)
        v = classify(prof, xs, t_max=args.t_max)
        hit = crossing_scan(prof, args.t_max, xs)
        same = (v.outcome == "Blowup") == (hit is not None)
        if not v.marginal:
            counted += 1
            agree += same
        rows.append((k, f"{prof!r}", prof.M0, v.outcome, v.marginal, None if hit is None else hit[0], same))
    print(f"{agree}/{counted} agree ({args.samples - counted} marginal excluded)")
    for r in rows:
        if not r[-1]:
            print("disagreement:", r)
    write_csv(args.out, ("sample", "profile", "M0", "verdict", "marginal", "crossing_time", "agree"), rows)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

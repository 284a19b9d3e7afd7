#!/usr/bin/env python3
"""Reproduce the blocking-probability curves: theory vs simulation.

Default scenario is the 100-node, 8x8-cell, B=8 network swept over
system load.  Writes the comparison CSV and prints a short table.

    python3 scripts/run_rbp_comparison.py --out rbp_case1.csv
    python3 scripts/run_rbp_comparison.py --n 400 --m 16 --slots 2000000
"""

import argparse
import sys

from twohop import NetworkParams
from twohop.harness import SweepSpec, render_csv, sweep
from twohop.sim import SimConfig


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--B", type=int, default=8)
    ap.add_argument("--nu", type=int, default=1)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--rho", type=str, default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    ap.add_argument("--slots", type=int, default=7_000_000)
    ap.add_argument("--warmup", type=int, default=100_000)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()

    params = NetworkParams(n=args.n, m=args.m, nu=args.nu, delta=args.delta, B=args.B)
    spec = SweepSpec(
        params=params,
        rho_grid=tuple(float(x) for x in args.rho.split(",")),
        sim=SimConfig(params=params, seed=args.seed, warmup_slots=args.warmup,
                      measure_slots=args.slots, replications=args.reps),
        outputs=("rbp",),
    )
    rows = sweep(spec, workers=args.workers)

    print(f"{'rho':>5} {'p_b theory':>12} {'rbp sim':>12} {'+/-':>9} {'abs err':>9}")
    for r in rows:
        print(f"{r.rho:5.2f} {r.pb_theory:12.6f} {r.pb_sim:12.6f} "
              f"{r.pb_ci:9.6f} {abs(r.pb_sim - r.pb_theory):9.6f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(render_csv(rows))
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Analytical delay curves over system load, optionally with simulation.

Prints queuing, delivery and end-to-end delay per load point for the
50-node, 5x5-cell, B=8 scenario (delivery delay shows its
rise-then-fall).  With --sim, also runs seeded replications per point
and writes the full comparison CSV; pick a grid-divisible scenario
(e.g. --n 20 --m 4 --B 5) if the simulated columns should track the
analytical ones.

    python3 scripts/run_delay_curves.py
    python3 scripts/run_delay_curves.py --n 20 --m 4 --B 5 --sim --out desk.csv
"""

import argparse
import sys

from twohop import NetworkParams, end_to_end_delay, solve_rbp, throughput_capacity
from twohop.harness import SweepSpec, render_csv, sweep
from twohop.sim import SimConfig


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--m", type=int, default=5)
    ap.add_argument("--B", type=int, default=8)
    ap.add_argument("--nu", type=int, default=1)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--rho", type=str,
                    default=",".join(f"{0.05 * i:.2f}" for i in range(1, 20)))
    ap.add_argument("--sim", action="store_true")
    ap.add_argument("--slots", type=int, default=2_000_000)
    ap.add_argument("--warmup", type=int, default=100_000)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()

    params = NetworkParams(n=args.n, m=args.m, nu=args.nu, delta=args.delta, B=args.B)
    rho_grid = tuple(float(x) for x in args.rho.split(","))
    lam0 = throughput_capacity(params)
    print(f"lambda0 = {lam0:.8g}")

    if args.sim:
        spec = SweepSpec(
            params=params,
            rho_grid=rho_grid,
            sim=SimConfig(params=params, seed=args.seed, warmup_slots=args.warmup,
                          measure_slots=args.slots, replications=args.reps),
        )
        rows = sweep(spec, workers=args.workers)
        print(f"{'rho':>5} {'W':>10} {'T':>10} {'D':>10} {'D sim':>10} {'+/-':>8}")
        for r in rows:
            print(f"{r.rho:5.2f} {r.W_theory:10.1f} {r.T_theory:10.1f} "
                  f"{r.D_theory:10.1f} {r.D_sim:10.1f} {r.D_ci:8.1f}")
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(render_csv(rows))
            print(f"wrote {args.out}", file=sys.stderr)
        return 0

    print(f"{'rho':>5} {'W':>12} {'T':>12} {'D':>12}")
    for rho in rho_grid:
        pt = params.with_lam(rho * lam0)
        if pt.lam >= lam0 - 1e-9:
            print(f"{rho:5.2f} {'inf':>12} {'inf':>12} {'inf':>12}")
            continue
        d = end_to_end_delay(pt, solve_rbp(pt))
        print(f"{rho:5.2f} {d.W:12.2f} {d.T:12.2f} {d.D:12.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

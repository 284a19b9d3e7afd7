"""Command-line front end.

Subcommands: theory (fixed point + delays for one scenario), capacity
(throughput limit), sim (seeded simulation), sweep (theory-vs-sim CSV
over a load grid), validate (the built-in acceptance suite).  Results go
to stdout or --out; diagnostics and traces go to stderr.  Exit codes:
0 success, 1 validation or solver failure, 2 bad arguments.
"""

from __future__ import annotations

import argparse
import os
import sys

from .blocking import solve_rbp, throughput_capacity
from .delay import delivery_delay, end_to_end_delay
from .harness import OUTPUT_GROUPS, SweepSpec, render_csv, sweep
from .params import NetworkParams, ParameterError, SolverError, UnstableLoadError
from .sim.engine import run, run_replica
from .sim.records import SimConfig

_CONFIG_KEYS = {
    "n": int, "m": int, "B": int, "nu": int, "delta": float,
    "rho": str, "lambda": float, "slots": int, "warmup": int,
    "reps": int, "seed": int, "outputs": str,
}


class CliError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twohop",
        description="Blocking and delay analysis of buffer-limited two-hop "
        "relay MANETs, validated by simulation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_params(p, need_lam=True):
        p.add_argument("--n", type=int, help="node count (even)")
        p.add_argument("--m", type=int, help="grid side in cells")
        p.add_argument("--B", type=int, help="relay-buffer capacity")
        p.add_argument("--nu", type=int, help="transmission-range parameter")
        p.add_argument("--delta", type=float, help="interference guard factor")
        if need_lam:
            p.add_argument("--lambda", dest="lam", type=float,
                           help="arrival rate, packets/slot")
            p.add_argument("--rho", type=str,
                           help="system load(s) lambda/lambda0, comma separated")

    def add_common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (default: $TWOHOP_SEED or 0)")
        p.add_argument("--out", type=str, default=None,
                       help="output path (default: stdout)")
        p.add_argument("--verbose", action="store_true")

    p_theory = sub.add_parser("theory", help="fixed point and delay breakdown")
    add_params(p_theory)
    add_common(p_theory)

    p_cap = sub.add_parser("capacity", help="throughput capacity lambda0")
    add_params(p_cap, need_lam=False)
    add_common(p_cap)

    p_sim = sub.add_parser("sim", help="run the simulator once")
    add_params(p_sim)
    add_common(p_sim)
    p_sim.add_argument("--slots", type=int, default=1_000_000,
                       help="measured slots per replication")
    p_sim.add_argument("--warmup", type=int, default=100_000)
    p_sim.add_argument("--reps", type=int, default=1)
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--trace", action="store_true",
                       help="log every transmission to stderr (slow engine)")

    p_sweep = sub.add_parser("sweep", help="theory-vs-sim CSV over a load grid")
    add_params(p_sweep)
    add_common(p_sweep)
    p_sweep.add_argument("--spec", type=str, default=None,
                         help="key = value sweep file; flags win")
    p_sweep.add_argument("--slots", type=int, default=None)
    p_sweep.add_argument("--warmup", type=int, default=None)
    p_sweep.add_argument("--reps", type=int, default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--outputs", type=str, default=None,
                         help="comma list from {rbp, delay}")

    p_val = sub.add_parser("validate", help="run the acceptance checks")
    p_val.add_argument("--only", type=str, default=None,
                       help="comma list of check-name substrings")
    p_val.add_argument("--workers", type=int, default=None)
    return parser


def _default_seed() -> int:
    try:
        return int(os.environ.get("TWOHOP_SEED", "0"))
    except ValueError:
        return 0


def _read_spec_file(path: str) -> dict:
    values = {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise CliError(f"cannot read spec file: {exc}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](val)
        except ValueError:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {val!r}")
    return values


def _network_params(ns, file_values: dict | None = None) -> NetworkParams:
    fv = file_values or {}

    def pick(flag, key, fallback):
        if flag is not None:
            return flag
        return fv.get(key, fallback)

    n = pick(ns.n, "n", None)
    m = pick(ns.m, "m", None)
    if n is None or m is None:
        raise CliError("--n and --m are required")
    return NetworkParams(
        n=n,
        m=m,
        nu=pick(ns.nu, "nu", 1),
        delta=pick(ns.delta, "delta", 1.0),
        B=pick(ns.B, "B", 8),
    )


def _parse_rho_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise CliError(f"bad rho list: {text!r}")


def _resolve_lam(ns, params: NetworkParams, file_values=None) -> float:
    fv = file_values or {}
    lam = ns.lam if ns.lam is not None else fv.get("lambda")
    rho = ns.rho if ns.rho is not None else fv.get("rho")
    if lam is not None and rho is not None:
        raise CliError("give either --lambda or --rho, not both")
    if rho is not None:
        grid = _parse_rho_list(str(rho))
        if len(grid) != 1:
            raise CliError("this subcommand takes a single rho")
        return grid[0] * throughput_capacity(params)
    return lam if lam is not None else 0.0


def _emit(ns, text: str) -> None:
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _kv_block(pairs) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in pairs)


def _params_echo(params: NetworkParams):
    return [
        ("n", params.n), ("m", params.m), ("nu", params.nu),
        ("delta", params.delta), ("B", params.B), ("lambda", params.lam),
    ]


def _cmd_theory(ns) -> int:
    params = _network_params(ns).with_lam(0.0)
    params = params.with_lam(_resolve_lam(ns, params))
    sol = solve_rbp(params)
    pairs = _params_echo(params) + [
        ("p_b", sol.p_b),
        ("mu_s", sol.mu_s),
        ("rho_s", sol.rho_s),
        ("lambda_r", sol.lambda_r),
        ("residual", sol.residual),
        ("pi", ",".join(repr(float(x)) for x in sol.pi)),
    ]
    try:
        d = end_to_end_delay(params, sol)
        pairs += [
            ("W", d.W), ("T", d.T), ("D", d.D), ("X_R", d.X_R),
            ("L_s", d.L_s), ("L_r_nf", d.L_r_nf), ("D_s", d.D_s),
            ("stable", 1),
        ]
    except UnstableLoadError:
        dd = delivery_delay(params, sol)
        pairs += [
            ("W", float("inf")), ("T", dd.T), ("D", float("inf")),
            ("X_R", dd.X_R), ("stable", 0),
        ]
    _emit(ns, _kv_block(pairs))
    return 0


def _cmd_capacity(ns) -> int:
    params = _network_params(ns)
    lam0 = throughput_capacity(params)
    check = solve_rbp(params.with_lam(lam0))
    pairs = _params_echo(params)[:-1] + [
        ("lambda0", lam0),
        ("mu_s_at_lambda0", check.mu_s),
        ("residual", abs(check.mu_s - lam0)),
    ]
    _emit(ns, _kv_block(pairs))
    return 0


def _cmd_sim(ns) -> int:
    params = _network_params(ns)
    params = params.with_lam(_resolve_lam(ns, params))
    seed = ns.seed if ns.seed is not None else _default_seed()
    config = SimConfig(
        params=params, seed=seed, warmup_slots=ns.warmup,
        measure_slots=ns.slots, replications=ns.reps,
    )
    if ns.trace:
        if config.replications != 1:
            raise CliError("--trace runs a single replication")

        def trace(slot, kind, tx, rx):
            print(f"{slot} {kind} {tx} {rx}", file=sys.stderr)

        replica = run_replica(params, seed, ns.warmup, ns.slots, trace=trace)
        replicas = [replica]
        from .sim.records import aggregate_report

        report = aggregate_report(replicas)
    else:
        report = run(config, workers=ns.workers)
    pairs = _params_echo(params) + [
        ("seed", seed),
        ("warmup_slots", config.warmup_slots),
        ("measure_slots", config.measure_slots),
        ("replications", config.replications),
        ("rbp_hat", report.rbp_hat),
        ("occupancy_hist", ",".join(repr(float(x)) for x in report.occupancy_hist)),
        ("mean_W", report.mean_W),
        ("mean_T", report.mean_T),
        ("mean_D", report.mean_D),
        ("mean_Ds", report.mean_Ds),
        ("mean_local_queue_len", report.mean_local_queue_len),
        ("generated_count", report.generated_count),
        ("delivered_count", report.delivered_count),
        ("in_flight_count", report.in_flight_count),
        ("sd_count", sum(r.sd_count for r in report.replicas)),
        ("sr_count", sum(r.sr_count for r in report.replicas)),
        ("rd_count", sum(r.rd_count for r in report.replicas)),
        ("handshake_blocked_count",
         sum(r.handshake_blocked_count for r in report.replicas)),
    ]
    _emit(ns, _kv_block(pairs))
    return 0


def _cmd_sweep(ns) -> int:
    fv = _read_spec_file(ns.spec) if ns.spec else {}
    params = _network_params(ns, fv)
    rho_text = ns.rho if ns.rho is not None else fv.get("rho")
    if ns.lam is not None or "lambda" in fv:
        raise CliError("sweep is driven by --rho (a load grid), not --lambda")
    if rho_text is None:
        raise CliError("sweep needs a rho grid (--rho or spec file)")
    rho_grid = _parse_rho_list(str(rho_text))

    outputs_text = ns.outputs if ns.outputs is not None else fv.get("outputs")
    outputs = (
        tuple(s.strip() for s in str(outputs_text).split(",") if s.strip())
        if outputs_text is not None
        else OUTPUT_GROUPS
    )
    reps = ns.reps if ns.reps is not None else fv.get(
        "reps", 3 if outputs == ("rbp",) else 10
    )
    seed = ns.seed if ns.seed is not None else fv.get("seed", _default_seed())
    config = SimConfig(
        params=params,
        seed=seed,
        warmup_slots=ns.warmup if ns.warmup is not None else fv.get("warmup", 100_000),
        measure_slots=ns.slots if ns.slots is not None else fv.get("slots", 10_000_000),
        replications=reps,
    )
    spec = SweepSpec(params=params, rho_grid=rho_grid, sim=config, outputs=outputs)
    workers = ns.workers if ns.workers is not None else (os.cpu_count() or 1)
    if ns.verbose:
        print(f"sweep: {len(rho_grid)} rows x {reps} replications, "
              f"{config.measure_slots} slots each", file=sys.stderr)
    rows = sweep(spec, workers=workers)
    _emit(ns, render_csv(rows))
    return 0


def _cmd_validate(ns) -> int:
    from .acceptance import run_acceptance

    names = [s.strip() for s in ns.only.split(",")] if ns.only else None
    workers = ns.workers if ns.workers is not None else (os.cpu_count() or 1)
    results = run_acceptance(names=names, workers=workers)
    if not results:
        print("no checks matched", file=sys.stderr)
        return 2
    return 0 if all(r.passed for r in results) else 1


_COMMANDS = {
    "theory": _cmd_theory,
    "capacity": _cmd_capacity,
    "sim": _cmd_sim,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return _COMMANDS[ns.subcommand](ns)
    except (CliError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (SolverError, UnstableLoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Theory-versus-simulation load sweeps with replication statistics.

A sweep walks a grid of system loads rho = lam / lam0, solves the
blocking fixed point and delay chain at each point, runs seeded
simulation replications, and emits one comparison row per load.  Rows at
rho >= 1 keep their blocking columns but carry infinite delay cells: the
local queue is unstable there and its waiting time diverges.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .blocking import RbpSolution, solve_rbp, throughput_capacity
from .delay import end_to_end_delay
from .params import NetworkParams, ParameterError
from .sim.engine import _replica_task
from .sim.records import SimConfig, SimReport, aggregate_report

# Replication r of row i runs with seed  master + i * SEED_STRIDE + r.
SEED_STRIDE = 10_000

CSV_HEADER = (
    "rho,lambda,pb_theory,pb_sim,pb_ci,W_theory,W_sim,W_ci,"
    "T_theory,T_sim,T_ci,D_theory,D_sim,D_ci,stable_flag"
)

OUTPUT_GROUPS = ("rbp", "delay")


@dataclass(frozen=True)
class SweepSpec:
    """A load sweep: scenario, rho grid, and the simulation template.

    The template's params and seed fields are the master values: each row
    replaces lam with rho * lam0 and offsets the seed.  outputs selects
    which quantity groups the simulations measure ("rbp" alone makes long
    blocking runs cheap); theory columns are always computed.
    """

    params: NetworkParams
    rho_grid: tuple[float, ...]
    sim: SimConfig
    outputs: tuple[str, ...] = OUTPUT_GROUPS

    def __post_init__(self):
        if not self.rho_grid:
            raise ParameterError("rho_grid must not be empty")
        if any(r <= 0 for r in self.rho_grid):
            raise ParameterError("every rho must be > 0")
        if any(x2 <= x1 for x1, x2 in zip(self.rho_grid, self.rho_grid[1:])):
            raise ParameterError("rho_grid must be strictly increasing")
        bad = set(self.outputs) - set(OUTPUT_GROUPS)
        if bad:
            raise ParameterError(f"unknown output groups: {sorted(bad)}")


@dataclass(frozen=True)
class ComparisonRow:
    """One sweep row: analytical values, simulated values, and errors."""

    rho: float
    lam: float
    stable: bool
    pb_theory: float
    W_theory: float
    T_theory: float
    D_theory: float
    pb_sim: float
    pb_ci: float
    W_sim: float
    W_ci: float
    T_sim: float
    T_ci: float
    D_sim: float
    D_ci: float
    errors: dict = field(default_factory=dict, repr=False)
    report: SimReport = field(default=None, repr=False)


def confidence_interval(samples) -> tuple[float, float]:
    """Mean and 95% normal-approximation halfwidth over replication means.

    With a single replication the interval is unavailable and the
    halfwidth is returned as nan.
    """
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    mean = float(np.mean(arr))
    if arr.size < 2:
        return mean, math.nan
    return mean, float(1.96 * np.std(arr, ddof=1) / math.sqrt(arr.size))


def _theory_columns(params: NetworkParams, lam0: float):
    sol = solve_rbp(params)
    stable = params.lam < lam0 - 1e-9
    if stable:
        d = end_to_end_delay(params, sol)
        return sol, stable, d.W, d.T, d.D
    return sol, stable, math.inf, math.inf, math.inf


def _row_errors(name_pairs):
    errors = {}
    for name, theory, sim in name_pairs:
        if math.isfinite(theory) and math.isfinite(sim):
            abs_err = abs(sim - theory)
            rel_err = abs_err / abs(theory) if theory != 0 else math.nan
        else:
            abs_err = rel_err = math.nan
        errors[name] = (abs_err, rel_err)
    return errors


def sweep(spec: SweepSpec, workers: int = 1) -> list[ComparisonRow]:
    """Run every row of the sweep; rows come back in grid order.

    Replications of all rows form one task pool, so workers > 1
    parallelizes across the whole sweep while the assembled output stays
    deterministic for a fixed master seed.
    """
    lam0 = throughput_capacity(spec.params)
    want_delay = "delay" in spec.outputs

    rows_meta = []
    tasks = []
    for i, rho in enumerate(spec.rho_grid):
        params_i = spec.params.with_lam(rho * lam0)
        base_seed = spec.sim.seed + i * SEED_STRIDE
        rows_meta.append((rho, params_i, base_seed))
        for r in range(spec.sim.replications):
            tasks.append(
                (params_i, base_seed + r, spec.sim.warmup_slots,
                 spec.sim.measure_slots, "kernel")
            )

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            replicas = list(pool.map(_replica_task, tasks))
    else:
        replicas = [_replica_task(t) for t in tasks]

    rows = []
    reps_per_row = spec.sim.replications
    for i, (rho, params_i, base_seed) in enumerate(rows_meta):
        try:
            sol, stable, W_t, T_t, D_t = _theory_columns(params_i, lam0)
            report = aggregate_report(replicas[i * reps_per_row : (i + 1) * reps_per_row])
            pb_sim, pb_ci = confidence_interval(report.per_replication("rbp_hat"))
            if want_delay and stable:
                W_s, W_ci = confidence_interval(report.per_replication("mean_W"))
                T_s, T_ci = confidence_interval(report.per_replication("mean_T"))
                D_s, D_ci = confidence_interval(report.per_replication("mean_D"))
            else:
                W_s = W_ci = T_s = T_ci = D_s = D_ci = math.inf if not stable else math.nan
        except Exception as exc:
            raise RuntimeError(f"sweep row rho={rho} failed: {exc}") from exc
        rows.append(
            ComparisonRow(
                rho=rho,
                lam=params_i.lam,
                stable=stable,
                pb_theory=sol.p_b,
                W_theory=W_t,
                T_theory=T_t,
                D_theory=D_t,
                pb_sim=pb_sim,
                pb_ci=pb_ci,
                W_sim=W_s,
                W_ci=W_ci,
                T_sim=T_s,
                T_ci=T_ci,
                D_sim=D_s,
                D_ci=D_ci,
                errors=_row_errors(
                    [("pb", sol.p_b, pb_sim), ("W", W_t, W_s),
                     ("T", T_t, T_s), ("D", D_t, D_s)]
                ),
                report=report,
            )
        )
    return rows


def _cell(x: float) -> str:
    return format(x, ".10g")


def render_csv(rows: list[ComparisonRow]) -> str:
    """Fixed-header CSV; unstable delay cells are the literal token inf."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _cell(r.rho), _cell(r.lam),
                    _cell(r.pb_theory), _cell(r.pb_sim), _cell(r.pb_ci),
                    _cell(r.W_theory), _cell(r.W_sim), _cell(r.W_ci),
                    _cell(r.T_theory), _cell(r.T_sim), _cell(r.T_ci),
                    _cell(r.D_theory), _cell(r.D_sim), _cell(r.D_ci),
                    "1" if r.stable else "0",
                ]
            )
        )
    return "\n".join(lines) + "\n"

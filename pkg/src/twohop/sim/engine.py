"""Replication orchestration for the slot-level simulator."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..params import NetworkParams
from ..scheduling import compute_epsilon
from . import _kernel as K
from ._rng import make_states
from .records import ReplicaStats, SimConfig, SimReport, aggregate_report
from .reference import run_replica_reference

_CHUNK_SLOTS = 2_000_000

# Initial packet-store sizing factor; tests shrink it to exercise growth.
_CAP_SCALE = 1.0


def run_replica(
    params: NetworkParams,
    seed: int,
    warmup_slots: int,
    measure_slots: int,
    engine: str = "kernel",
    trace=None,
) -> ReplicaStats:
    """One independent simulation run; bit-identical across both engines."""
    if engine == "reference" or trace is not None:
        return run_replica_reference(params, seed, warmup_slots, measure_slots, trace)
    if engine != "kernel":
        raise ValueError(f"unknown engine {engine!r}")

    n, m, nu, B, lam = params.n, params.m, params.nu, params.B, params.lam
    eps = compute_epsilon(params).epsilon
    total = warmup_slots + measure_slots

    expected = n * lam * total
    cap = int((expected + 6.0 * math.sqrt(expected + 1.0)) * _CAP_SCALE) + 2 * n + 64

    pos = np.zeros(n, dtype=np.int64)
    engaged_at = np.full(n, -1, dtype=np.int64)
    lq_head = np.full(n, -1, dtype=np.int64)
    lq_tail = np.full(n, -1, dtype=np.int64)
    lq_len = np.zeros(n, dtype=np.int64)
    rq_buf = np.zeros((n, B), dtype=np.int64)
    rq_start = np.zeros(n, dtype=np.int64)
    rq_len = np.zeros(n, dtype=np.int64)
    nodes_at_level = np.zeros(B + 1, dtype=np.int64)
    nodes_at_level[0] = n

    pk = {
        name: np.empty(cap, dtype=np.int64)
        for name in ("arr", "hol", "dep", "del", "nxt", "dst")
    }
    acc = np.zeros(K.N_ACC, dtype=np.int64)
    occ_counts = np.zeros(B + 1, dtype=np.int64)

    kmax = ((m + eps - 1) // eps) ** 2
    order = np.zeros(kmax, dtype=np.int64)
    bucket_count = np.zeros(kmax, dtype=np.int64)
    bucket_start = np.zeros(kmax, dtype=np.int64)
    bucket_fill = np.zeros(kmax, dtype=np.int64)
    members = np.zeros(n, dtype=np.int64)
    node_rank = np.zeros(n, dtype=np.int64)
    cell_occ = np.zeros(n, dtype=np.int64)
    cov_occ = np.zeros(n, dtype=np.int64)
    sd_tx = np.zeros(n, dtype=np.int64)

    states, incs = make_states(seed & 0xFFFFFFFFFFFFFFFF)

    t = 0
    while t < total:
        t_next = min(t + _CHUNK_SLOTS, total)
        t = K.run_chunk(
            t, t_next, n, m, eps, nu, B, lam, warmup_slots, cap,
            states, incs, pos, engaged_at, lq_head, lq_tail, lq_len,
            rq_buf, rq_start, rq_len, nodes_at_level,
            pk["arr"], pk["hol"], pk["dep"], pk["del"], pk["nxt"], pk["dst"],
            acc, occ_counts, order, members, node_rank,
            bucket_count, bucket_start, bucket_fill, cell_occ, cov_occ, sd_tx,
        )
        if acc[K.A_ERR]:
            raise RuntimeError("simulation invariant violated (relay accounting)")
        if t < t_next:  # packet store nearly full: double it and resume
            cap *= 2
            for name in pk:
                grown = np.empty(cap, dtype=np.int64)
                grown[: acc[K.A_NPKTS]] = pk[name][: acc[K.A_NPKTS]]
                pk[name] = grown

    denom = float(n * measure_slots)
    n_delay = int(acc[K.A_NDELAY])
    n_ds = int(acc[K.A_NDS])
    generated = int(acc[K.A_GEN])
    delivered = int(acc[K.A_DEL])
    return ReplicaStats(
        seed=seed,
        rbp_hat=occ_counts[B] / denom,
        occupancy_hist=occ_counts.astype(float) / denom,
        mean_W=acc[K.A_SUMW] / n_delay if n_delay else math.nan,
        mean_T=acc[K.A_SUMT] / n_delay if n_delay else math.nan,
        mean_D=acc[K.A_SUMD] / n_delay if n_delay else math.nan,
        mean_Ds=acc[K.A_SUMDS] / n_ds if n_ds else math.nan,
        mean_local_queue_len=acc[K.A_LLEN] / denom,
        generated_count=generated,
        delivered_count=delivered,
        in_flight_count=generated - delivered,
        n_delay_samples=n_delay,
        n_local_samples=n_ds,
        sd_count=int(acc[K.A_SD]),
        sr_count=int(acc[K.A_SR]),
        rd_count=int(acc[K.A_RD]),
        handshake_blocked_count=int(acc[K.A_BLOCKED]),
    )


def _replica_task(args) -> ReplicaStats:
    params, seed, warmup, measure, engine = args
    return run_replica(params, seed, warmup, measure, engine)


def run(config: SimConfig, workers: int = 1, engine: str = "kernel") -> SimReport:
    """Run all replications of a configuration and aggregate them.

    Replication r uses seed ``config.seed + r``.  The report is a pure
    function of (config, engine); workers only changes the schedule.
    """
    tasks = [
        (config.params, config.seed + r, config.warmup_slots, config.measure_slots, engine)
        for r in range(config.replications)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            replicas = list(pool.map(_replica_task, tasks))
    else:
        replicas = [_replica_task(t) for t in tasks]

    report = aggregate_report(replicas)
    if report.generated_count != report.delivered_count + report.in_flight_count:
        raise RuntimeError("packet conservation violated")
    return report

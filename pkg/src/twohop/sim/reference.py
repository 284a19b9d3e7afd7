"""Pure-Python engine, the readable mirror of the compiled kernel.

Consumes random draws in exactly the same order as ``_kernel.run_chunk``
and therefore produces bit-identical reports (the test suite enforces
this).  It is hundreds of times slower, so it is meant for small desk
checks and for tracing: pass ``trace`` to receive one record per
transmission event, with kind "sd", "sr", "rd" or "idle-handshake".
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..params import NetworkParams
from ..scheduling import compute_epsilon
from ._rng import Pcg32, STREAM_ARRIVAL, STREAM_MOBILITY, STREAM_SCHED
from .records import ReplicaStats

TraceFn = Callable[[int, str, int, int], None]


def run_replica_reference(
    params: NetworkParams,
    seed: int,
    warmup_slots: int,
    measure_slots: int,
    trace: TraceFn | None = None,
) -> ReplicaStats:
    n, m, nu, B, lam = params.n, params.m, params.nu, params.B, params.lam
    eps = compute_epsilon(params).epsilon
    m2 = m * m
    reach = nu - 1
    total = warmup_slots + measure_slots

    rng = [Pcg32(seed & 0xFFFFFFFFFFFFFFFF, k) for k in range(3)]
    mob, arr, sch = rng[STREAM_MOBILITY], rng[STREAM_ARRIVAL], rng[STREAM_SCHED]

    pos = [0] * n
    engaged_at = [-1] * n
    local: list[list[int]] = [[] for _ in range(n)]  # local FIFO, head first
    relay: list[list[int]] = [[] for _ in range(n)]  # relay FIFO, head first
    nodes_at_level = [0] * (B + 1)
    nodes_at_level[0] = n

    pk_arr: list[int] = []
    pk_hol: list[int] = []
    pk_dep: list[int] = []
    pk_del: list[int] = []
    pk_dst: list[int] = []

    generated = delivered = 0
    sum_W = sum_T = sum_D = n_delay = 0
    sum_Ds = n_ds = 0
    llen_sum = cur_local = 0
    sd_count = sr_count = rd_count = blocked = 0
    occ_counts = [0] * (B + 1)

    def torus_dist(a: int, b: int) -> int:
        d = abs(a - b)
        return min(d, m - d)

    def in_coverage(node: int, crow: int, ccol: int) -> bool:
        pr, pc = divmod(pos[node], m)
        return torus_dist(pr, crow) <= reach and torus_dist(pc, ccol) <= reach

    def pop_local(tx: int, t: int) -> int:
        nonlocal cur_local, sum_Ds, n_ds
        pk = local[tx].pop(0)
        if local[tx]:
            pk_hol[local[tx][0]] = t
        cur_local -= 1
        pk_dep[pk] = t
        if pk_arr[pk] >= warmup_slots:
            sum_Ds += t - pk_arr[pk]
            n_ds += 1
        return pk

    def deliver(pk: int, t: int) -> None:
        nonlocal delivered, sum_W, sum_T, sum_D, n_delay
        pk_del[pk] = t
        delivered += 1
        if pk_arr[pk] >= warmup_slots:
            sum_W += pk_hol[pk] - pk_arr[pk]
            sum_T += t - pk_hol[pk]
            sum_D += t - pk_arr[pk]
            n_delay += 1

    for t in range(total):
        # 1. mobility
        for i in range(n):
            pos[i] = mob.bounded(m2)

        # 2. arrivals
        for i in range(n):
            if arr.uniform() < lam:
                pk = len(pk_arr)
                pk_arr.append(t)
                pk_hol.append(-1)
                pk_dep.append(-1)
                pk_del.append(-1)
                pk_dst.append(i ^ 1)
                if not local[i]:
                    pk_hol[pk] = t
                local[i].append(pk)
                cur_local += 1
                generated += 1

        # 3. the active group's cells, in shuffled order
        g = t % (eps * eps)
        gr, gc = divmod(g, eps)
        nrows = (m - gr + eps - 1) // eps
        ncols = (m - gc + eps - 1) // eps
        k_act = nrows * ncols
        order = list(range(k_act))
        for j in range(k_act - 1, 0, -1):
            r = sch.bounded(j + 1)
            order[j], order[r] = order[r], order[j]

        buckets: list[list[int]] = [[] for _ in range(k_act)]
        for i in range(n):
            cr, cc = divmod(pos[i], m)
            if cr % eps == gr and cc % eps == gc:
                buckets[(cr // eps) * ncols + cc // eps].append(i)

        for rank in order:
            if not buckets[rank]:
                continue
            cell_occ = [i for i in buckets[rank] if engaged_at[i] != t]
            if not cell_occ:
                continue
            crow = gr + (rank // ncols) * eps
            ccol = gc + (rank % ncols) * eps
            cell_id = crow * m + ccol

            if nu == 1:
                cov_occ = list(cell_occ)
            else:
                cov_occ = [
                    i
                    for i in range(n)
                    if engaged_at[i] != t and in_coverage(i, crow, ccol)
                ]

            # pairs in contact, enumerated by their in-cell transmitter
            sd_candidates = []
            for i in cell_occ:
                pt = i ^ 1
                if engaged_at[pt] == t:
                    continue
                if nu == 1:
                    hit = pos[pt] == cell_id
                else:
                    hit = in_coverage(pt, crow, ccol)
                if hit:
                    sd_candidates.append(i)

            if sd_candidates:
                tx = sd_candidates[sch.bounded(len(sd_candidates))]
                rx = tx ^ 1
                engaged_at[tx] = t
                engaged_at[rx] = t
                if local[tx]:
                    pk = pop_local(tx, t)
                    deliver(pk, t)
                    sd_count += 1
                    if trace:
                        trace(t, "sd", tx, rx)
                continue

            if len(cov_occ) < 2:
                continue
            tx = cell_occ[sch.bounded(len(cell_occ))]
            txpos = cov_occ.index(tx)
            ridx = sch.bounded(len(cov_occ) - 1)
            rx = cov_occ[ridx] if ridx < txpos else cov_occ[ridx + 1]
            engaged_at[tx] = t
            engaged_at[rx] = t

            if sch.bounded(2) == 0:
                if len(relay[rx]) == B:
                    blocked += 1
                    if trace:
                        trace(t, "idle-handshake", tx, rx)
                elif local[tx]:
                    lvl = len(relay[rx])
                    pk = pop_local(tx, t)
                    relay[rx].append(pk)
                    nodes_at_level[lvl] -= 1
                    nodes_at_level[lvl + 1] += 1
                    sr_count += 1
                    if trace:
                        trace(t, "sr", tx, rx)
            else:
                found = -1
                for j, pk in enumerate(relay[tx]):
                    if pk_dst[pk] == rx:
                        found = j
                        break
                if found >= 0:
                    lvl = len(relay[tx])
                    pk = relay[tx].pop(found)
                    nodes_at_level[lvl] -= 1
                    nodes_at_level[lvl - 1] += 1
                    deliver(pk, t)
                    rd_count += 1
                    if trace:
                        trace(t, "rd", tx, rx)

        # 4. end-of-slot statistics
        if t >= warmup_slots:
            for k in range(B + 1):
                occ_counts[k] += nodes_at_level[k]
            llen_sum += cur_local

        assert all(len(q) <= B for q in relay), "relay buffer exceeded capacity"

    denom = n * measure_slots
    return ReplicaStats(
        seed=seed,
        rbp_hat=occ_counts[B] / denom,
        occupancy_hist=np.array(occ_counts, dtype=float) / denom,
        mean_W=sum_W / n_delay if n_delay else math.nan,
        mean_T=sum_T / n_delay if n_delay else math.nan,
        mean_D=sum_D / n_delay if n_delay else math.nan,
        mean_Ds=sum_Ds / n_ds if n_ds else math.nan,
        mean_local_queue_len=llen_sum / denom,
        generated_count=generated,
        delivered_count=delivered,
        in_flight_count=generated - delivered,
        n_delay_samples=n_delay,
        n_local_samples=n_ds,
        sd_count=sd_count,
        sr_count=sr_count,
        rd_count=rd_count,
        handshake_blocked_count=blocked,
    )

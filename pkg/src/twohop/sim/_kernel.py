"""Compiled slot loop.

One call advances the simulation over a range of slots, mutating the
state arrays in place.  It pauses (returning the slot reached) when the
packet store could overflow within the next slot, so the caller can grow
the arrays and resume; on normal completion it returns the end slot.

Draw order and tie-breaking are a strict contract with
``reference.py`` -- see the package docstring.  Any change here must be
mirrored there, and the equivalence test will catch a mismatch.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._rng import pcg_bounded, pcg_uniform

# accumulator slots (int64)
A_GEN = 0  # packets generated, warmup included
A_DEL = 1  # packets delivered, warmup included
A_SUMW = 2  # sum of (t_hol - t_arrival) over measured delivered packets
A_SUMT = 3  # sum of (t_delivered - t_hol)
A_SUMD = 4  # sum of (t_delivered - t_arrival)
A_NDELAY = 5  # measured delivered packets
A_SUMDS = 6  # sum of local-queue sojourns of measured departed packets
A_NDS = 7  # measured departed packets
A_LLEN = 8  # per-slot sum of total local-queue backlog, measured slots
A_SD = 9
A_SR = 10
A_RD = 11
A_BLOCKED = 12  # handshakes cancelled on a full relay buffer
A_CURLOCAL = 13  # current total local backlog (running)
A_NPKTS = 14  # next free packet index
A_ERR = 15  # set nonzero if an internal invariant breaks
N_ACC = 16


@njit(cache=True)
def run_chunk(
    t0,
    t_end,
    n,
    m,
    eps,
    nu,
    B,
    lam,
    warmup,
    cap,
    states,
    incs,
    pos,
    engaged_at,
    lq_head,
    lq_tail,
    lq_len,
    rq_buf,
    rq_start,
    rq_len,
    nodes_at_level,
    pk_arr,
    pk_hol,
    pk_dep,
    pk_del,
    pk_nxt,
    pk_dst,
    acc,
    occ_counts,
    order,
    members,
    node_rank,
    bucket_count,
    bucket_start,
    bucket_fill,
    cell_occ,
    cov_occ,
    sd_tx,
):
    m2 = m * m
    reach = nu - 1
    for t in range(t0, t_end):
        if acc[A_NPKTS] + n > cap:
            return t  # caller grows the packet store and resumes

        # -- mobility: fresh uniform cell for every node
        for i in range(n):
            pos[i] = pcg_bounded(states, incs, 0, m2)

        # -- exogenous arrivals
        for i in range(n):
            if pcg_uniform(states, incs, 1) < lam:
                pk = acc[A_NPKTS]
                acc[A_NPKTS] = pk + 1
                pk_arr[pk] = t
                pk_hol[pk] = -1
                pk_dep[pk] = -1
                pk_del[pk] = -1
                pk_nxt[pk] = -1
                pk_dst[pk] = i ^ 1
                if lq_head[i] < 0:
                    lq_head[i] = pk
                    lq_tail[i] = pk
                    pk_hol[pk] = t
                else:
                    pk_nxt[lq_tail[i]] = pk
                    lq_tail[i] = pk
                lq_len[i] += 1
                acc[A_CURLOCAL] += 1
                acc[A_GEN] += 1

        # -- active group and its cell list (row major over the lattice)
        g = t % (eps * eps)
        gr = g // eps
        gc = g % eps
        nrows = (m - gr + eps - 1) // eps
        ncols = (m - gc + eps - 1) // eps
        k_act = nrows * ncols

        for j in range(k_act):
            order[j] = j
        for j in range(k_act - 1, 0, -1):
            r = pcg_bounded(states, incs, 2, j + 1)
            tmp = order[j]
            order[j] = order[r]
            order[r] = tmp

        # -- bucket nodes by active cell (stable, node index ascending)
        for j in range(k_act):
            bucket_count[j] = 0
        for i in range(n):
            c = pos[i]
            cr = c // m
            cc = c % m
            if cr % eps == gr and cc % eps == gc:
                rank = (cr // eps) * ncols + cc // eps
                node_rank[i] = rank
                bucket_count[rank] += 1
            else:
                node_rank[i] = -1
        acc_s = 0
        for j in range(k_act):
            bucket_start[j] = acc_s
            acc_s += bucket_count[j]
            bucket_fill[j] = 0
        for i in range(n):
            rank = node_rank[i]
            if rank >= 0:
                members[bucket_start[rank] + bucket_fill[rank]] = i
                bucket_fill[rank] += 1

        # -- each active cell runs the handshake two-hop relay step
        for oi in range(k_act):
            rank = order[oi]
            cnt = bucket_count[rank]
            if cnt == 0:
                continue
            base = bucket_start[rank]
            n_cell = 0
            for j in range(cnt):
                i = members[base + j]
                if engaged_at[i] != t:
                    cell_occ[n_cell] = i
                    n_cell += 1
            if n_cell == 0:
                continue

            crow = gr + (rank // ncols) * eps
            ccol = gc + (rank % ncols) * eps
            cell_id = crow * m + ccol

            if nu == 1:
                n_cov = n_cell
                for j in range(n_cell):
                    cov_occ[j] = cell_occ[j]
            else:
                n_cov = 0
                for i in range(n):
                    if engaged_at[i] == t:
                        continue
                    pr = pos[i] // m
                    pc = pos[i] % m
                    dr = pr - crow
                    if dr < 0:
                        dr = -dr
                    if m - dr < dr:
                        dr = m - dr
                    dc = pc - ccol
                    if dc < 0:
                        dc = -dc
                    if m - dc < dc:
                        dc = m - dc
                    if dr <= reach and dc <= reach:
                        cov_occ[n_cov] = i
                        n_cov += 1

            # candidate transmitters of a pair in contact (transmitter in
            # the cell; both orders qualify when both nodes are inside)
            n_sd = 0
            for j in range(n_cell):
                i = cell_occ[j]
                pt = i ^ 1
                if engaged_at[pt] == t:
                    continue
                if nu == 1:
                    hit = pos[pt] == cell_id
                else:
                    pr = pos[pt] // m
                    pc = pos[pt] % m
                    dr = pr - crow
                    if dr < 0:
                        dr = -dr
                    if m - dr < dr:
                        dr = m - dr
                    dc = pc - ccol
                    if dc < 0:
                        dc = -dc
                    if m - dc < dc:
                        dc = m - dc
                    hit = dr <= reach and dc <= reach
                if hit:
                    sd_tx[n_sd] = i
                    n_sd += 1

            if n_sd > 0:
                tx = sd_tx[pcg_bounded(states, incs, 2, n_sd)]
                rx = tx ^ 1
                engaged_at[tx] = t
                engaged_at[rx] = t
                pk = lq_head[tx]
                if pk >= 0:
                    # source delivers its head-of-line packet directly
                    nx = pk_nxt[pk]
                    lq_head[tx] = nx
                    if nx < 0:
                        lq_tail[tx] = -1
                    else:
                        pk_hol[nx] = t
                    lq_len[tx] -= 1
                    acc[A_CURLOCAL] -= 1
                    pk_dep[pk] = t
                    pk_del[pk] = t
                    acc[A_DEL] += 1
                    acc[A_SD] += 1
                    if pk_arr[pk] >= warmup:
                        acc[A_SUMDS] += t - pk_arr[pk]
                        acc[A_NDS] += 1
                        acc[A_SUMW] += pk_hol[pk] - pk_arr[pk]
                        acc[A_SUMT] += t - pk_hol[pk]
                        acc[A_SUMD] += t - pk_arr[pk]
                        acc[A_NDELAY] += 1
                continue

            if n_cov < 2:
                continue
            tx = cell_occ[pcg_bounded(states, incs, 2, n_cell)]
            txpos = 0
            for j in range(n_cov):
                if cov_occ[j] == tx:
                    txpos = j
                    break
            ridx = pcg_bounded(states, incs, 2, n_cov - 1)
            rx = cov_occ[ridx] if ridx < txpos else cov_occ[ridx + 1]
            engaged_at[tx] = t
            engaged_at[rx] = t

            if pcg_bounded(states, incs, 2, 2) == 0:
                # heads: handshake, then source-to-relay unless blocked
                lvl = rq_len[rx]
                if lvl == B:
                    acc[A_BLOCKED] += 1
                else:
                    pk = lq_head[tx]
                    if pk >= 0:
                        nx = pk_nxt[pk]
                        lq_head[tx] = nx
                        if nx < 0:
                            lq_tail[tx] = -1
                        else:
                            pk_hol[nx] = t
                        lq_len[tx] -= 1
                        acc[A_CURLOCAL] -= 1
                        pk_dep[pk] = t
                        if pk_arr[pk] >= warmup:
                            acc[A_SUMDS] += t - pk_arr[pk]
                            acc[A_NDS] += 1
                        rq_buf[rx, (rq_start[rx] + lvl) % B] = pk
                        rq_len[rx] = lvl + 1
                        nodes_at_level[lvl] -= 1
                        nodes_at_level[lvl + 1] += 1
                        acc[A_SR] += 1
            else:
                # tails: relay delivers its oldest packet destined to rx
                ln = rq_len[tx]
                found = -1
                for j in range(ln):
                    pk = rq_buf[tx, (rq_start[tx] + j) % B]
                    if pk_dst[pk] == rx:
                        found = j
                        break
                if found >= 0:
                    pk = rq_buf[tx, (rq_start[tx] + found) % B]
                    if found == 0:
                        rq_start[tx] = (rq_start[tx] + 1) % B
                    else:
                        for j in range(found, ln - 1):
                            rq_buf[tx, (rq_start[tx] + j) % B] = rq_buf[
                                tx, (rq_start[tx] + j + 1) % B
                            ]
                    rq_len[tx] = ln - 1
                    nodes_at_level[ln] -= 1
                    nodes_at_level[ln - 1] += 1
                    pk_del[pk] = t
                    acc[A_DEL] += 1
                    acc[A_RD] += 1
                    if pk_arr[pk] >= warmup:
                        acc[A_SUMW] += pk_hol[pk] - pk_arr[pk]
                        acc[A_SUMT] += t - pk_hol[pk]
                        acc[A_SUMD] += t - pk_arr[pk]
                        acc[A_NDELAY] += 1

        # -- end-of-slot statistics
        if t >= warmup:
            for k in range(B + 1):
                occ_counts[k] += nodes_at_level[k]
            acc[A_LLEN] += acc[A_CURLOCAL]

        if nodes_at_level[0] < 0:
            acc[A_ERR] = 1
            return t

    return t_end

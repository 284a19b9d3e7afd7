"""Built-in validation suite.

Eleven numbered checks cross-validate the analytical results against
independent oracles and against the simulator at fixed scenario scales
and tolerances.  Both ``twohop validate`` and the test suite run these;
each check reports one pass/fail line.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blocking import occupancy_distribution, solve_rbp, throughput_capacity
from .delay import end_to_end_delay
from .harness import SEED_STRIDE, SweepSpec, render_csv, sweep
from .params import NetworkParams
from .scheduling import contact_probabilities, transmission_probabilities
from .sim.records import SimConfig
from .sim.engine import run

DESK = NetworkParams(n=20, m=4, nu=1, delta=1.0, B=5)
CASE1 = NetworkParams(n=100, m=8, nu=1, delta=1.0, B=8)
FIG5 = NetworkParams(n=50, m=5, nu=1, delta=1.0, B=8)

_batch_cache: dict = {}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _desk_batch(workers: int):
    """10 replications x 1e7 measured slots of the desk scenario at
    rho = 0.6; shared by the occupancy, end-to-end and Little's-law checks."""
    if "desk" not in _batch_cache:
        lam0 = throughput_capacity(DESK)
        params = DESK.with_lam(0.6 * lam0)
        config = SimConfig(
            params=params, seed=7, warmup_slots=100_000,
            measure_slots=10_000_000, replications=10,
        )
        _batch_cache["desk"] = (params, run(config, workers=workers))
    return _batch_cache["desk"]


def check_rbp_case1(workers: int = 1) -> tuple[bool, str]:
    """1. |rbp_hat - p_b| <= 0.02 on the n=100, m=8, B=8 grid, >= 2e7 slots."""
    spec = SweepSpec(
        params=CASE1,
        rho_grid=(0.4, 0.6, 0.8, 1.0),
        sim=SimConfig(
            params=CASE1, seed=42, warmup_slots=100_000,
            measure_slots=7_000_000, replications=3,
        ),
        outputs=("rbp",),
    )
    rows = sweep(spec, workers=workers)
    worst = max(abs(r.pb_sim - r.pb_theory) for r in rows)
    detail = "max |rbp_hat - p_b| = %.5f over rho in {0.4,0.6,0.8,1.0} (tol 0.02)" % worst
    return worst <= 0.02, detail


def check_rbp_desk(workers: int = 1) -> tuple[bool, str]:
    """2. Desk case rho=0.6: |rbp_hat - p_b| <= 0.01 with 1e7 slots in <= 60 s."""
    lam0 = throughput_capacity(DESK)
    params = DESK.with_lam(0.6 * lam0)
    sol = solve_rbp(params)
    t0 = time.perf_counter()
    report = run(SimConfig(params=params, seed=1, warmup_slots=100_000,
                           measure_slots=10_000_000))
    elapsed = time.perf_counter() - t0
    diff = abs(report.rbp_hat - sol.p_b)
    detail = "|rbp_hat - p_b| = %.5f (tol 0.01), %.1f s (budget 60 s)" % (diff, elapsed)
    return diff <= 0.01 and elapsed <= 60.0, detail


def check_occupancy_desk(workers: int = 1) -> tuple[bool, str]:
    """3. Desk case: total-variation distance between simulated occupancy
    histogram and the stationary distribution <= 0.02."""
    params, report = _desk_batch(workers)
    sol = solve_rbp(params)
    tv = 0.5 * float(np.abs(report.occupancy_hist - sol.pi).sum())
    return tv <= 0.02, "occupancy TV distance = %.5f (tol 0.02)" % tv


def check_delivery_shape(workers: int = 1) -> tuple[bool, str]:
    """4. Delivery delay over rho = 0.05..0.95 rises to an interior maximum
    and falls afterwards (n=50, m=5, B=8 scenario)."""
    lam0 = throughput_capacity(FIG5)
    rhos = [0.05 * i for i in range(1, 20)]
    T = []
    for rho in rhos:
        params = FIG5.with_lam(rho * lam0)
        T.append(end_to_end_delay(params, solve_rbp(params)).T)
    imax = int(np.argmax(T))
    interior = 0 < imax < len(T) - 1
    rising = T[1] > T[0] and T[2] > T[1]
    falling = T[-1] < T[-2] and T[-2] < T[-3]
    detail = "T peaks at rho=%.2f (interior=%s rising2=%s falling2=%s)" % (
        rhos[imax], interior, rising, falling,
    )
    return interior and rising and falling, detail


def check_queuing_divergence(workers: int = 1) -> tuple[bool, str]:
    """5. W(0.99 lam0) > 50 x W(0.5 lam0) for the same scenario."""
    lam0 = throughput_capacity(FIG5)
    w = {}
    for frac in (0.5, 0.99):
        params = FIG5.with_lam(frac * lam0)
        w[frac] = end_to_end_delay(params, solve_rbp(params)).W
    ratio = w[0.99] / w[0.5]
    return ratio > 50.0, "W(0.99 lam0) / W(0.5 lam0) = %.1f (> 50 required)" % ratio


def check_end_to_end_desk(workers: int = 1) -> tuple[bool, str]:
    """6. Desk case rho=0.6: relative end-to-end error <= 0.15 over 10
    replications of 1e7 slots."""
    params, report = _desk_batch(workers)
    d = end_to_end_delay(params, solve_rbp(params))
    rel = abs(report.mean_D - d.D) / d.D
    detail = "D sim %.1f vs theory %.1f, rel err %.4f (tol 0.15)" % (
        report.mean_D, d.D, rel,
    )
    return rel <= 0.15, detail


def check_relay_rate_identity(workers: int = 1) -> tuple[bool, str]:
    """7. Closed-form relay service rate equals its combinatorial sum to
    1e-12 relative for n in {4..60} even, k <= 20."""
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(4, 61, 2):
        for k in range(1, 21):
            total = 0.0
            for i in range(1, k + 1):
                total += (
                    math.comb(n - 2, i) * math.comb(k - 1, i - 1)
                    / math.comb(n - 3 + k, k) * (i / (n - 2))
                )
            closed = k / (n - 3 + k)
            worst = max(worst, abs(total - closed) / closed)
    elapsed = time.perf_counter() - t0
    detail = "max rel diff sum-vs-closed = %.2e (tol 1e-12), %.2f s" % (worst, elapsed)
    return worst <= 1e-12 and elapsed < 1.0, detail


def placement_oracle(params: NetworkParams, samples: int, seed: int = 0):
    """Monte Carlo estimate of (p, q) by dropping nodes on the torus."""
    n, m, nu = params.n, params.m, params.nu
    rng = np.random.default_rng(seed)
    reach = nu - 1
    rows = np.arange(m * m) // m
    cols = np.arange(m * m) % m
    dr = np.minimum(rows, m - rows)
    dc = np.minimum(cols, m - cols)
    covmask = (dr <= reach) & (dc <= reach)  # coverage of cell (0, 0)

    hit_p = 0
    hit_q = 0
    done = 0
    while done < samples:
        chunk = min(200_000, samples - done)
        pos = rng.integers(0, m * m, size=(chunk, n))
        in_c = pos == 0
        in_cov = covmask[pos]
        hit_p += int(((in_c.sum(axis=1) >= 1) & (in_cov.sum(axis=1) >= 2)).sum())
        pair_hit = np.zeros(chunk, dtype=bool)
        for j in range(0, n, 2):
            pair_hit |= (in_c[:, j] & in_cov[:, j + 1]) | (in_c[:, j + 1] & in_cov[:, j])
        hit_q += int(pair_hit.sum())
        done += chunk
    return hit_p / samples, hit_q / samples


def check_contact_oracle(workers: int = 1) -> tuple[bool, str]:
    """8. p, q within 4 sigma of a 1e6-sample placement oracle for three
    scenarios, and the small exact values reproduced to 1e-12."""
    samples = 1_000_000
    worst_sigma = 0.0
    for n, m, nu in ((2, 2, 1), (4, 2, 1), (10, 4, 2)):
        params = NetworkParams(n=n, m=m, nu=nu)
        p, q = contact_probabilities(params)
        p_hat, q_hat = placement_oracle(params, samples, seed=n * 100 + m)
        for truth, est in ((p, p_hat), (q, q_hat)):
            sigma = math.sqrt(truth * (1 - truth) / samples)
            if sigma > 0:
                worst_sigma = max(worst_sigma, abs(est - truth) / sigma)
    p2, q2 = contact_probabilities(NetworkParams(n=2, m=2, nu=1))
    p4, q4 = contact_probabilities(NetworkParams(n=4, m=2, nu=1))
    exact = (
        abs(p2 - 1 / 16) <= 1e-12
        and abs(q2 - 1 / 16) <= 1e-12
        and abs(p4 - 67 / 256) <= 1e-12
        and abs(q4 - 31 / 256) <= 1e-12
    )
    detail = "worst |est - value| = %.2f sigma (tol 4), exact fractions %s" % (
        worst_sigma, "ok" if exact else "WRONG",
    )
    return worst_sigma <= 4.0 and exact, detail


def check_fixed_point_agreement(workers: int = 1) -> tuple[bool, str]:
    """9. Residual <= 1e-10 and bisection/damped agreement <= 1e-9 over 100
    randomized valid parameter sets."""
    rng = np.random.default_rng(20260809)
    worst_resid = 0.0
    worst_gap = 0.0
    for _ in range(100):
        n = 2 * int(rng.integers(2, 61))
        m = int(rng.integers(2, 13))
        nu = int(rng.integers(1, min((m + 1) // 2, 3) + 1))
        delta = float(rng.uniform(0.0, 2.0))
        B = int(rng.integers(1, 13))
        params = NetworkParams(n=n, m=m, nu=nu, delta=delta, B=B)
        lam0 = throughput_capacity(params)
        lam = min(float(rng.uniform(0.05, 1.15)) * lam0, 0.999)
        params = params.with_lam(lam)
        a = solve_rbp(params, method="bisect")
        b = solve_rbp(params, method="damped")
        worst_resid = max(worst_resid, a.residual, b.residual)
        worst_gap = max(worst_gap, abs(a.p_b - b.p_b))
    detail = "worst residual %.2e (tol 1e-10), worst method gap %.2e (tol 1e-9)" % (
        worst_resid, worst_gap,
    )
    return worst_resid <= 1e-10 and worst_gap <= 1e-9, detail


def check_determinism_conservation(workers: int = 1) -> tuple[bool, str]:
    """10. Identical seeds give byte-identical sweep CSV; generated =
    delivered + in-flight exactly on every run."""
    params = NetworkParams(n=10, m=2, nu=1, delta=1.0, B=2)
    spec = SweepSpec(
        params=params,
        rho_grid=(0.3, 0.7),
        sim=SimConfig(params=params, seed=5, warmup_slots=2_000,
                      measure_slots=30_000, replications=3),
    )
    csv_a = render_csv(sweep(spec))
    csv_b = render_csv(sweep(spec))
    identical = csv_a == csv_b
    conserved = True
    for rows in (sweep(spec),):
        for row in rows:
            rep = row.report
            conserved &= rep.generated_count == rep.delivered_count + rep.in_flight_count
            for rr in rep.replicas:
                conserved &= rr.generated_count == rr.delivered_count + rr.in_flight_count
    detail = "csv byte-identical: %s, conservation exact: %s" % (identical, conserved)
    return identical and conserved, detail


def check_littles_law(workers: int = 1) -> tuple[bool, str]:
    """11. Time-averaged local backlog matches lam x measured local sojourn
    within 3% at the desk case."""
    params, report = _desk_batch(workers)
    lhs = report.mean_local_queue_len
    rhs = params.lam * report.mean_Ds
    rel = abs(lhs - rhs) / lhs
    detail = "L = %.5f vs lam*Ds = %.5f, rel err %.4f (tol 0.03)" % (lhs, rhs, rel)
    return rel <= 0.03, detail


CHECKS: dict[str, Callable[[int], tuple[bool, str]]] = {
    "01-rbp-case1": check_rbp_case1,
    "02-rbp-desk": check_rbp_desk,
    "03-occupancy-desk": check_occupancy_desk,
    "04-delivery-shape": check_delivery_shape,
    "05-queuing-divergence": check_queuing_divergence,
    "06-end-to-end-desk": check_end_to_end_desk,
    "07-relay-rate-identity": check_relay_rate_identity,
    "08-contact-oracle": check_contact_oracle,
    "09-fixed-point-agreement": check_fixed_point_agreement,
    "10-determinism-conservation": check_determinism_conservation,
    "11-littles-law": check_littles_law,
}


def run_acceptance(
    names=None, workers: int = 1, emit: Callable[[str], None] = print
) -> list[CheckResult]:
    """Run the selected checks (all by default), one pass/fail line each."""
    results = []
    for name, fn in CHECKS.items():
        if names and not any(s in name for s in names):
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(workers)
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - t0
        results.append(CheckResult(name, passed, detail, elapsed))
        emit("%s %s (%.1fs): %s" % ("PASS" if passed else "FAIL", name, elapsed, detail))
    return results

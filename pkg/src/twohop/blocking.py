"""Relay-buffer occupancy distribution and the blocking-probability fixed point.

The relay queue of a node is a birth-death chain on {0..B} with constant
birth rate lambda_r and occupancy-dependent death rate mu_r(k); its
stationary weights are C_k * rho_s^k with C_k = binom(n-3+k, k) and
rho_s = lam / mu_s.  Because mu_s itself depends on the blocking
probability p_b = pi_B, p_b is the root of a one-dimensional fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import NetworkParams, SolverError, require_relay_model
from .scheduling import SchedulingConstants, transmission_probabilities

# Unnormalized occupancy terms are rescaled whenever they pass this bound,
# so the recurrence never overflows even for n in the hundreds.
_RESCALE_AT = 1e280

# Margin (packets/slot) below capacity that still counts as a stable load.
STABILITY_MARGIN = 1e-9


@dataclass
class RbpSolution:
    """Converged blocking fixed point for one (params, lam) scenario.

    pi[k] is the stationary probability of k packets in a relay buffer;
    p_b = pi[B] exactly.  residual is |f(p_b) - p_b| for the fixed-point
    map f actually solved.
    """

    p_b: float
    mu_s: float
    rho_s: float
    lambda_r: float
    pi: np.ndarray
    residual: float
    iterations: int
    method: str
    constants: SchedulingConstants = field(repr=False, default=None)


def occupancy_terms(n: int, B: int, rho_s: float) -> np.ndarray:
    """Unnormalized stationary weights C_k * rho_s^k, k = 0..B.

    Built multiplicatively (term_k = term_{k-1} * rho_s * (n-3+k) / k) so the
    binomials are never materialized on their own.
    """
    terms = np.empty(B + 1)
    terms[0] = 1.0
    for k in range(1, B + 1):
        terms[k] = terms[k - 1] * rho_s * (n - 3 + k) / k
        if terms[k] > _RESCALE_AT:
            terms[: k + 1] /= terms[k]
    return terms


def occupancy_distribution(n: int, B: int, rho_s: float) -> np.ndarray:
    """Stationary relay-occupancy distribution pi_0..pi_B at a given
    occupancy ratio rho_s = lam / mu_s."""
    if n < 4:
        raise ValueError(f"occupancy weights need n >= 4, got n={n}")
    if rho_s < 0:
        raise ValueError(f"rho_s must be >= 0, got {rho_s}")
    terms = occupancy_terms(n, B, rho_s)
    return terms / terms.sum()


def relay_service_rate(params: NetworkParams, k: int, p_rd: float | None = None) -> float:
    """Service rate of a relay queue holding k packets: k/(n-3+k) * p_rd.

    The closed form equals the combinatorial average over which flows the
    queued packets belong to; the test suite checks that sum term by term.
    """
    require_relay_model(params)
    if not 0 <= k <= params.B:
        raise ValueError(f"occupancy k must be in [0, B], got {k}")
    if p_rd is None:
        p_rd = transmission_probabilities(params).p_rd
    if k == 0:
        return 0.0
    return k / (params.n - 3 + k) * p_rd


def _blocking_map(params: NetworkParams, consts: SchedulingConstants):
    """Returns f with f(x) = pi_B when the blocking probability is assumed x.

    f is non-decreasing on [0, 1]: a larger assumed blocking lowers mu_s,
    raising rho_s and with it the mass at B.
    """
    n, B, lam = params.n, params.B, params.lam

    def f(x: float) -> float:
        mu_s = consts.p_sd + consts.p_sr * (1.0 - x)
        if mu_s <= 0.0:
            # No transmission opportunities at all: any traffic saturates.
            return 1.0 if lam > 0 else 0.0
        terms = occupancy_terms(n, B, lam / mu_s)
        return terms[B] / terms.sum()

    return f


def _finish(params, consts, x, residual, iterations, method) -> RbpSolution:
    mu_s = consts.p_sd + consts.p_sr * (1.0 - x)
    rho_s = params.lam / mu_s if mu_s > 0 else np.inf
    pi = occupancy_distribution(params.n, params.B, rho_s)
    # pin the identity p_b == pi[B] exactly rather than to solver tolerance
    return RbpSolution(
        p_b=float(pi[params.B]),
        mu_s=mu_s,
        rho_s=rho_s,
        lambda_r=params.lam * consts.p_sr / mu_s if mu_s > 0 else np.inf,
        pi=pi,
        residual=residual,
        iterations=iterations,
        method=method,
        constants=consts,
    )


def solve_rbp(
    params: NetworkParams,
    tol: float = 1e-12,
    max_iter: int = 200,
    method: str = "bisect",
    residual_tol: float = 1e-10,
) -> RbpSolution:
    """Solve p_b = f(p_b) for the relay-buffer blocking probability.

    method "bisect" (default) brackets the root of f(x) - x on [0, 1];
    method "damped" iterates x <- (1-alpha) x + alpha f(x) with alpha = 0.5
    and is kept as an independent cross-check of the bisection path.
    """
    require_relay_model(params)
    consts = transmission_probabilities(params)
    f = _blocking_map(params, consts)

    if params.lam == 0.0:
        return _finish(params, consts, 0.0, 0.0, 0, method)

    if method == "bisect":
        lo, hi = 0.0, 1.0
        x = 0.5
        for it in range(1, max_iter + 1):
            x = 0.5 * (lo + hi)
            gx = f(x) - x
            if gx > 0.0:
                lo = x
            else:
                hi = x
            if hi - lo <= tol:
                break
        x = 0.5 * (lo + hi)
        residual = float(abs(f(x) - x))
        if residual > residual_tol:
            raise SolverError("blocking fixed point did not converge", residual)
        return _finish(params, consts, x, residual, it, method)

    if method == "damped":
        # x <- (x + f(x)) / 2 climbs monotonically from 0 to the root; the
        # geometric rate estimated from successive steps bounds the
        # remaining error, which handles maps with slope close to 1.
        x = 0.0
        delta_prev = 0.0  # 0 marks "no previous step yet"
        for it in range(1, 200_000 + 1):
            x_next = 0.5 * (x + f(x))
            delta = abs(x_next - x)
            x = x_next
            if delta == 0.0:
                break
            rate = delta / delta_prev if delta_prev > 0.0 else 1.0
            if rate < 1.0 and delta * rate / (1.0 - rate) < 0.05 * residual_tol:
                break
            delta_prev = delta
        residual = float(abs(f(x) - x))
        if residual > residual_tol:
            raise SolverError("damped blocking iteration did not converge", residual)
        return _finish(params, consts, x, residual, it, method)

    raise ValueError(f"unknown method {method!r}")


def throughput_capacity(
    params: NetworkParams,
    tol: float = 1e-12,
    max_iter: int = 200,
    method: str = "bisect",
) -> float:
    """The largest sustainable arrival rate lam0, solving mu_s(lam0) = lam0.

    mu_s(lam) - lam is strictly decreasing, positive at 0 and nonpositive at
    p_sd + p_sr, so the root is bracketed.  At the root rho_s = 1 exactly,
    which gives the closed identity lam0 = p_sd + p_sr * B / (n - 2 + B)
    used by the tests as an oracle.
    """
    require_relay_model(params)
    consts = transmission_probabilities(params)

    def mu_s_at(lam: float) -> float:
        return solve_rbp(params.with_lam(lam), tol=tol, method="bisect").mu_s

    hi = consts.p_sd + consts.p_sr
    if hi <= 0.0:
        return 0.0
    if method == "bisect":
        lo = 0.0
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            if mu_s_at(mid) - mid > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= tol * max(1.0, hi):
                break
        lam0 = 0.5 * (lo + hi)
        residual = abs(mu_s_at(lam0) - lam0)
        if residual > 1e-10:
            raise SolverError("capacity solve did not converge", residual)
        return lam0

    if method == "damped":
        # lam <- lam + alpha (mu_s(lam) - lam), backtracking on alpha until
        # the residual shrinks.  mu_s(lam) - lam is strictly decreasing with
        # slope <= -1, so |residual| bounds |lam - lam0| directly.
        lam = 0.5 * hi
        r = mu_s_at(lam) - lam
        alpha = 0.5
        for _ in range(10_000):
            if abs(r) <= 1e-11 * max(1.0, hi):
                break
            cand = min(max(lam + alpha * r, 0.0), hi)
            r_cand = mu_s_at(cand) - cand
            while abs(r_cand) >= abs(r) and alpha > 1e-12:
                alpha *= 0.5
                cand = min(max(lam + alpha * r, 0.0), hi)
                r_cand = mu_s_at(cand) - cand
            lam, r = cand, r_cand
            alpha = min(alpha * 2.0, 0.5)
        residual = abs(mu_s_at(lam) - lam)
        if residual > 1e-10:
            raise SolverError("damped capacity iteration did not converge", residual)
        return lam

    raise ValueError(f"unknown method {method!r}")

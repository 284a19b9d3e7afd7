"""Queuing, delivery and end-to-end delay from a converged blocking solution.

The local queue is a discrete-time Bernoulli/Bernoulli queue with service
rate mu_s.  Delivery of a head-of-line packet is an absorbing chain: stay at
the source (1 - mu_s), jump straight to the destination (p_sd), or detour
through a relay (p_sr (1 - p_b)), from which absorption takes X_R expected
slots.  The relay-to-destination opportunity p_rd is split evenly over the
n-2 flows a relay serves, so a packet that joins a not-full relay queue
behind j same-destination packets waits (j+1)(n-2)/p_rd slots on average.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .blocking import STABILITY_MARGIN, RbpSolution
from .params import (
    NetworkParams,
    TotalBlockingError,
    UnstableLoadError,
    require_relay_model,
)


class QueuingDelay(NamedTuple):
    L_s: float
    D_s: float
    W: float


class DeliveryDelay(NamedTuple):
    X_R: float
    T: float


class ConditionalOccupancy(NamedTuple):
    pi_prime: np.ndarray
    L_r_nf: float
    L_r_nf_1: float


@dataclass(frozen=True)
class DelayBreakdown:
    """Expected per-packet delays (slots) with the main intermediates."""

    W: float
    T: float
    D: float
    X_R: float
    L_s: float
    L_r_nf: float
    D_s: float


def _require_stable(params: NetworkParams, solution: RbpSolution) -> None:
    if solution.mu_s - params.lam <= STABILITY_MARGIN:
        raise UnstableLoadError(params.lam, solution.mu_s)


def queuing_delay(params: NetworkParams, solution: RbpSolution) -> QueuingDelay:
    """Mean local-queue length, sojourn, and waiting time before head-of-line."""
    _require_stable(params, solution)
    lam, mu = params.lam, solution.mu_s
    L_s = (lam - lam * lam) / (mu - lam)
    D_s = (1.0 - lam) / (mu - lam)
    W = lam * (1.0 - mu) / (mu * (mu - lam))
    return QueuingDelay(L_s=L_s, D_s=D_s, W=W)


def conditional_occupancy(
    params: NetworkParams, solution: RbpSolution
) -> ConditionalOccupancy:
    """Occupancy distribution of a relay queue given it is not full, its
    mean, and the per-flow share of that mean."""
    require_relay_model(params)
    pi = solution.pi
    B = params.B
    not_full = 1.0 - pi[B]
    if not_full <= 0.0:
        raise TotalBlockingError(
            "relay buffer is full with probability one; conditional "
            "occupancy is undefined"
        )
    pi_prime = pi[:B] / not_full
    L_r_nf = float(np.arange(B) @ pi_prime)
    return ConditionalOccupancy(
        pi_prime=pi_prime, L_r_nf=L_r_nf, L_r_nf_1=L_r_nf / (params.n - 2)
    )


def delivery_delay(params: NetworkParams, solution: RbpSolution) -> DeliveryDelay:
    """Expected slots from head-of-line to arrival at the destination.

    Finite at any load: the absorbing chain starts at the head of the
    line, so it does not need the local queue to be stable.
    """
    consts = solution.constants
    if consts is None:
        from .scheduling import transmission_probabilities

        consts = transmission_probabilities(params)
    occ = conditional_occupancy(params, solution)
    X_R = (params.n - 2) / consts.p_rd * (1.0 + occ.L_r_nf_1)
    T = (1.0 + X_R * consts.p_sr * (1.0 - solution.p_b)) / solution.mu_s
    return DeliveryDelay(X_R=X_R, T=T)


def end_to_end_delay(params: NetworkParams, solution: RbpSolution) -> DelayBreakdown:
    """Full delay breakdown; D = W + T by definition."""
    q = queuing_delay(params, solution)
    occ = conditional_occupancy(params, solution)
    d = delivery_delay(params, solution)
    return DelayBreakdown(
        W=q.W,
        T=d.T,
        D=q.W + d.T,
        X_R=d.X_R,
        L_s=q.L_s,
        L_r_nf=occ.L_r_nf,
        D_s=q.D_s,
    )

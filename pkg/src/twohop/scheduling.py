"""Group-based scheduling constants and per-slot contact probabilities.

All quantities refer to a torus of m x m cells under i.i.d. node placement.
Coverage of a cell is the (2*nu-1)^2 block of cells centred on it, with
wraparound, so every coverage region holds exactly l cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .params import NetworkParams

# Direct integer evaluation of the contact formulas is exact, but the
# intermediate m^(2n) must stay convertible to float for the final division.
_EXACT_BITS = 900


class GridLayout(NamedTuple):
    epsilon: int
    K: int
    l: int


@dataclass(frozen=True)
class SchedulingConstants:
    """Derived scheduling quantities for one scenario.

    epsilon -- spacing between concurrently active cells
    K       -- cells per scheduling group, floor(m^2 / epsilon^2)
    l       -- coverage-region size (2*nu-1)^2 in cells
    p       -- P(an active cell sees some node in it and another in coverage)
    q       -- P(an active cell sees a source-destination pair in contact)
    p_sd    -- per-node per-slot source-to-destination opportunity
    p_sr    -- per-node per-slot source-to-relay opportunity
    p_rd    -- per-node per-slot relay-to-destination opportunity (= p_sr)
    """

    epsilon: int
    K: int
    l: int
    p: float
    q: float
    p_sd: float
    p_sr: float
    p_rd: float


def compute_epsilon(params: NetworkParams) -> GridLayout:
    """Smallest cell spacing that keeps concurrent transmissions
    interference-free, clamped to the grid side."""
    raw = (1.0 + params.delta) * math.sqrt(2.0) * params.nu + params.nu
    epsilon = min(math.ceil(raw), params.m)
    K = (params.m * params.m) // (epsilon * epsilon)
    l = (2 * params.nu - 1) ** 2
    return GridLayout(epsilon=epsilon, K=K, l=l)


def contact_probabilities(params: NetworkParams) -> tuple[float, float]:
    """Per-active-cell contact probabilities (p, q).

    p: at least one node in the cell and at least one other node within its
       coverage.  q: additionally the two nodes form a source-destination
       pair.  Exact integer arithmetic where m^(2n) is representable,
       log-domain otherwise.
    """
    n, m = params.n, params.m
    l = (2 * params.nu - 1) ** 2
    m2 = m * m

    if 2 * n * math.log2(m) < _EXACT_BITS:
        denom = m2**n
        p_num = denom - (m2 - 1) ** n - n * (m2 - l) ** (n - 1)
        q_num = denom - (m2 * m2 - 2 * l + 1) ** (n // 2)
        return p_num / denom, q_num / denom

    # 1 - (1 - 1/m^2)^n - (n/m^2) (1 - l/m^2)^(n-1), summed compensated:
    # the two subtracted terms can nearly cancel the 1 for sparse grids.
    a = math.exp(n * math.log1p(-1.0 / m2))
    b = (n / m2) * math.exp((n - 1) * math.log1p(-l / m2))
    p = math.fsum((1.0, -a, -b))
    q = -math.expm1((n // 2) * math.log1p(-(2 * l - 1) / (m2 * m2)))
    return p, q


def transmission_probabilities(params: NetworkParams) -> SchedulingConstants:
    """All scheduling constants, including the per-node opportunity rates."""
    epsilon, K, l = compute_epsilon(params)
    p, q = contact_probabilities(params)
    n = params.n
    p_sd = (K / n) * q
    p_sr = (K / (2 * n)) * max(p - q, 0.0)
    return SchedulingConstants(
        epsilon=epsilon, K=K, l=l, p=p, q=q, p_sd=p_sd, p_sr=p_sr, p_rd=p_sr
    )


scheduling_constants = transmission_probabilities

"""Simulation configuration and result records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..params import NetworkParams, ParameterError


@dataclass(frozen=True)
class SimConfig:
    """One simulation request: scenario, horizon, and reproducibility.

    warmup_slots are executed but excluded from every statistic; delay
    samples come only from packets arriving inside the measured window.
    """

    params: NetworkParams
    seed: int = 0
    warmup_slots: int = 100_000
    measure_slots: int = 1_000_000
    replications: int = 1

    def __post_init__(self):
        if self.warmup_slots < 0:
            raise ParameterError(f"warmup_slots must be >= 0, got {self.warmup_slots}")
        if self.measure_slots < 1:
            raise ParameterError(f"measure_slots must be >= 1, got {self.measure_slots}")
        if self.replications < 1:
            raise ParameterError(f"replications must be >= 1, got {self.replications}")


@dataclass(frozen=True)
class ReplicaStats:
    """Raw measurements of a single replication."""

    seed: int
    rbp_hat: float
    occupancy_hist: np.ndarray
    mean_W: float
    mean_T: float
    mean_D: float
    mean_Ds: float
    mean_local_queue_len: float
    generated_count: int
    delivered_count: int
    in_flight_count: int
    n_delay_samples: int
    n_local_samples: int
    sd_count: int
    sr_count: int
    rd_count: int
    handshake_blocked_count: int


@dataclass(frozen=True)
class SimReport:
    """Replication-aggregated simulation outcome.

    Scalar metrics are equal-weight averages over replication means (the
    same statistics the confidence intervals are built from); counts are
    totals.  generated_count == delivered_count + in_flight_count holds
    exactly on every run: the handshake cancels transfers into full
    buffers instead of dropping.
    """

    rbp_hat: float
    occupancy_hist: np.ndarray
    mean_W: float
    mean_T: float
    mean_D: float
    mean_Ds: float
    mean_local_queue_len: float
    generated_count: int
    delivered_count: int
    in_flight_count: int
    replicas: tuple[ReplicaStats, ...] = field(repr=False, default=())

    def per_replication(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.replicas], dtype=float)


def _mean_ignoring_nan(values) -> float:
    vals = [v for v in values if not math.isnan(v)]
    return float(np.mean(vals)) if vals else math.nan


def aggregate_report(replicas: list[ReplicaStats]) -> SimReport:
    hist = np.mean([r.occupancy_hist for r in replicas], axis=0)
    return SimReport(
        rbp_hat=float(np.mean([r.rbp_hat for r in replicas])),
        occupancy_hist=hist,
        mean_W=_mean_ignoring_nan(r.mean_W for r in replicas),
        mean_T=_mean_ignoring_nan(r.mean_T for r in replicas),
        mean_D=_mean_ignoring_nan(r.mean_D for r in replicas),
        mean_Ds=_mean_ignoring_nan(r.mean_Ds for r in replicas),
        mean_local_queue_len=float(np.mean([r.mean_local_queue_len for r in replicas])),
        generated_count=sum(r.generated_count for r in replicas),
        delivered_count=sum(r.delivered_count for r in replicas),
        in_flight_count=sum(r.in_flight_count for r in replicas),
        replicas=tuple(replicas),
    )
